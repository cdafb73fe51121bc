//! Feature matrix with labels, provenance, and schema.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::features::{FeatureFamily, FeatureSchema, FeatureVector};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

use super::PipelineError;

/// Rows are window pairs, columns follow the schema; every row carries its
/// binary label and originating experiment id.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<F> {
    pub x: Matrix<F>,
    pub labels: Vec<u8>,
    pub experiment_ids: Vec<String>,
    pub schema: FeatureSchema,
}

impl<F: Scalar> Dataset<F> {
    pub fn new(
        x: Matrix<F>,
        labels: Vec<u8>,
        experiment_ids: Vec<String>,
        schema: FeatureSchema,
    ) -> Result<Self, PipelineError> {
        if x.rows() == 0 {
            return Err(PipelineError::EmptyDataset);
        }
        if x.rows() != labels.len() || x.rows() != experiment_ids.len() {
            return Err(PipelineError::LengthMismatch {
                rows: x.rows(),
                labels: labels.len(),
                ids: experiment_ids.len(),
            });
        }
        assert_eq!(x.cols(), schema.len(), "matrix width must match schema");
        if x.has_non_finite() {
            return Err(PipelineError::NonFinite);
        }
        Ok(Self { x, labels, experiment_ids, schema })
    }

    pub fn from_feature_vectors(
        schema: FeatureSchema,
        vectors: Vec<FeatureVector<F>>,
    ) -> Result<Self, PipelineError> {
        let mut labels = Vec::with_capacity(vectors.len());
        let mut ids = Vec::with_capacity(vectors.len());
        let mut rows = Vec::with_capacity(vectors.len());
        for v in vectors {
            labels.push(v.label);
            ids.push(v.experiment_id);
            rows.push(v.values);
        }
        Self::new(Matrix::from_rows(rows), labels, ids, schema)
    }

    pub fn n_rows(&self) -> usize {
        self.x.rows()
    }

    pub fn n_cols(&self) -> usize {
        self.x.cols()
    }

    /// (normal, defective) row counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let defective = self.labels.iter().filter(|&&l| l != 0).count();
        (self.labels.len() - defective, defective)
    }

    /// Keep only the columns whose descriptor family matches, across both
    /// sensors and all axes. Idempotent.
    pub fn select_family(&self, family: FeatureFamily) -> Result<Self, PipelineError> {
        let columns = self.schema.family_columns(family);
        if columns.is_empty() {
            return Err(PipelineError::UnknownFamily(family.name().to_string()));
        }
        Ok(Self {
            x: self.x.select_cols(&columns),
            labels: self.labels.clone(),
            experiment_ids: self.experiment_ids.clone(),
            schema: self.schema.select(&columns),
        })
    }

    /// Dataset restricted to the given rows, in that order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        Self {
            x: self.x.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            experiment_ids: indices.iter().map(|&i| self.experiment_ids[i].clone()).collect(),
            schema: self.schema.clone(),
        }
    }

    /// Write the matrix as CSV: schema names as header plus trailing
    /// `experiment_id,label` columns, one row per window pair.
    pub fn write_csv(&self, path: &Path) -> Result<(), PipelineError> {
        let file = File::create(path).map_err(|source| PipelineError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut w = BufWriter::new(file);
        let io_err = |source| PipelineError::Io { path: path.to_path_buf(), source };

        let mut header: Vec<&str> = self.schema.names().collect();
        header.push("experiment_id");
        header.push("label");
        writeln!(w, "{}", header.join(",")).map_err(io_err)?;

        for i in 0..self.n_rows() {
            let mut line = String::new();
            for v in self.x.row(i) {
                line.push_str(&v.to_string());
                line.push(',');
            }
            line.push_str(&self.experiment_ids[i]);
            line.push(',');
            line.push_str(&self.labels[i].to_string());
            writeln!(w, "{line}").map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }

    /// Read a matrix written by [`Dataset::write_csv`], validating the
    /// header against `schema`.
    pub fn read_csv(path: &Path, schema: FeatureSchema) -> Result<Self, PipelineError> {
        let file = File::open(path).map_err(|source| PipelineError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut lines = BufReader::new(file).lines().enumerate();
        let csv_err = |line: usize, reason: String| PipelineError::Csv {
            path: path.to_path_buf(),
            line,
            reason,
        };

        let (_, header) = lines
            .next()
            .ok_or_else(|| csv_err(1, "missing header".into()))?;
        let header = header.map_err(|e| csv_err(1, e.to_string()))?;
        let expected: Vec<&str> = schema
            .names()
            .chain(["experiment_id", "label"])
            .collect();
        let got: Vec<&str> = header.split(',').collect();
        if got != expected {
            return Err(csv_err(1, format!(
                "header does not match schema ({} columns vs {} expected)",
                got.len(),
                expected.len()
            )));
        }

        let width = schema.len();
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let mut ids = Vec::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            let line = line.map_err(|e| csv_err(line_no, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != width + 2 {
                return Err(csv_err(line_no, format!(
                    "expected {} fields, found {}",
                    width + 2,
                    fields.len()
                )));
            }
            let mut row = Vec::with_capacity(width);
            for f in &fields[..width] {
                let v: F = f
                    .parse()
                    .map_err(|_| csv_err(line_no, format!("bad value '{f}'")))?;
                row.push(v);
            }
            ids.push(fields[width].to_string());
            let label: u8 = fields[width + 1]
                .parse()
                .map_err(|_| csv_err(line_no, format!("bad label '{}'", fields[width + 1])))?;
            labels.push(label);
            rows.push(row);
        }
        Self::new(Matrix::from_rows(rows), labels, ids, schema)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_dataset() -> Dataset<f64> {
        let schema = FeatureSchema::new(1, 2, 2); // per axis: 4+2+2+1+1 = 10, total 60
        let n = schema.len();
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..n).map(|j| (i * n + j) as f64 * 0.25 - 3.0).collect())
            .collect();
        Dataset::new(
            Matrix::from_rows(rows),
            vec![0, 1, 1, 0],
            (0..4).map(|i| format!("e{i}")).collect(),
            schema,
        )
        .unwrap()
    }

    #[test]
    fn select_family_filters_schema_and_columns() {
        let ds = toy_dataset();
        let wavelets = ds.select_family(FeatureFamily::Wavelet).unwrap();
        assert_eq!(wavelets.n_cols(), 12); // 2 nodes x 3 axes x 2 sensors
        assert!(wavelets
            .schema
            .descriptors()
            .iter()
            .all(|d| d.family == FeatureFamily::Wavelet));
        // Idempotent.
        let again = wavelets.select_family(FeatureFamily::Wavelet).unwrap();
        assert_eq!(again, wavelets);
    }

    #[test]
    fn csv_round_trip() {
        let ds = toy_dataset();
        let dir = std::env::temp_dir().join(format!("rv-ds-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("m.csv");
        ds.write_csv(&path).unwrap();
        let back = Dataset::<f64>::read_csv(&path, ds.schema.clone()).unwrap();
        assert_eq!(back, ds);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn mismatched_counts_rejected() {
        let schema = FeatureSchema::new(1, 2, 2);
        let m = Matrix::<f64>::zeros(2, schema.len());
        let err = Dataset::new(m, vec![0], vec!["a".into(), "b".into()], schema).unwrap_err();
        assert!(matches!(err, PipelineError::LengthMismatch { .. }));
    }
}
