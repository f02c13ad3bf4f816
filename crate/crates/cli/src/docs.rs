//! JSON documents read and written by the CLI.

use jnrlab::{BiPoly, Complex, JnrData, JnrError};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JnrInputDocument {
    pub version: u32,
    pub weights: Vec<f64>,
    pub poles: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDocument {
    pub version: u32,
    pub n: usize,
    /// `coefficients[k][l]` multiplies `eta^k zeta^l`.
    pub coefficients: Vec<Vec<[f64; 2]>>,
}

pub fn pair(z: Complex) -> [f64; 2] {
    [z.re, z.im]
}

fn check_version(v: u32) -> Result<(), CliError> {
    if v != VERSION {
        return Err(CliError::Validation(format!("unsupported document version {v}; expected {VERSION}")));
    }
    Ok(())
}

impl JnrInputDocument {
    pub fn from_data(d: &JnrData, labels: Option<Vec<String>>) -> Self {
        Self {
            version: VERSION,
            weights: d.weights().to_vec(),
            poles: d.poles().iter().map(|g| pair(*g)).collect(),
            labels,
        }
    }

    pub fn to_data(&self, sep: f64) -> Result<JnrData, CliError> {
        check_version(self.version)?;
        if let Some(labels) = &self.labels {
            if labels.len() != self.poles.len() {
                return Err(CliError::Validation(format!(
                    "{} labels for {} poles; give one label per pole or none",
                    labels.len(),
                    self.poles.len()
                )));
            }
        }
        let poles = self.poles.iter().map(|[re, im]| Complex::new(*re, *im)).collect();
        JnrData::with_separation(self.weights.clone(), poles, sep).map_err(CliError::from)
    }
}

impl CurveDocument {
    pub fn from_curve(p: &BiPoly) -> Self {
        Self {
            version: VERSION,
            n: p.n(),
            coefficients: p.rows().iter().map(|r| r.iter().map(|c| pair(*c)).collect()).collect(),
        }
    }

    pub fn to_curve(&self) -> Result<BiPoly, CliError> {
        check_version(self.version)?;
        let rows: Vec<Vec<Complex>> = self
            .coefficients
            .iter()
            .map(|r| r.iter().map(|[re, im]| Complex::new(*re, *im)).collect())
            .collect();
        if let Some((k, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != self.n + 1) {
            return Err(CliError::Validation(format!(
                "coefficient row {k} has {} entries; bidegree ({n}, {n}) needs {}",
                r.len(),
                self.n + 1,
                n = self.n
            )));
        }
        BiPoly::from_rows(self.n, &rows).map_err(CliError::from)
    }
}

/// Either kind of input file.
pub enum Input {
    Jnr(JnrInputDocument),
    Curve(CurveDocument),
}

pub fn parse_any(bytes: &[u8]) -> Result<Input, CliError> {
    let v: Value = serde_json::from_slice(bytes).map_err(|e| CliError::Validation(format!("not valid JSON: {e}")))?;
    if v.get("coefficients").is_some() {
        Ok(Input::Curve(serde_json::from_value(v).map_err(bad_document)?))
    } else {
        Ok(Input::Jnr(serde_json::from_value(v).map_err(bad_document)?))
    }
}

pub fn parse_jnr(bytes: &[u8]) -> Result<JnrInputDocument, CliError> {
    match parse_any(bytes)? {
        Input::Jnr(d) => Ok(d),
        Input::Curve(_) => Err(CliError::Validation("expected weights and poles, found a curve document".into())),
    }
}

pub fn parse_curve(bytes: &[u8]) -> Result<CurveDocument, CliError> {
    match parse_any(bytes)? {
        Input::Curve(c) => Ok(c),
        Input::Jnr(_) => Err(CliError::Validation("expected a curve document with coefficients".into())),
    }
}

fn bad_document(e: serde_json::Error) -> CliError {
    CliError::Validation(format!("malformed document: {e}"))
}

pub fn parse_complex(s: &str) -> Result<Complex, CliError> {
    let bad = || CliError::Validation(format!("expected re,im but got {s:?}"));
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    Ok(Complex::new(re, im))
}

impl From<JnrError> for CliError {
    fn from(e: JnrError) -> Self {
        use JnrError::*;
        let msg = e.to_string();
        match e {
            InvalidData(_) | DuplicatePoles(..) | Shape { .. } | ZeroPolynomial | IncompatibleDegrees
            | NonUnitRotation(_) => CliError::Validation(msg),
            NoGridFound { .. } => CliError::NotFound(msg),
            ResourceLimit { .. } => CliError::Resource(msg),
            _ => CliError::Check(msg),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_jnr() {
        let text = r#"{"version":1,"weights":[1.0,2.0],"poles":[[0.0,0.0],[1.0,-1.0]],"labels":["a","b"]}"#;
        let doc = parse_jnr(text.as_bytes()).unwrap();
        let d = doc.to_data(1e-8).unwrap();
        assert_eq!(JnrInputDocument::from_data(&d, doc.labels.clone()), doc);
    }

    #[test]
    fn rejects_mismatched_labels() {
        let text = r#"{"version":1,"weights":[1.0,2.0],"poles":[[0.0,0.0],[1.0,-1.0]],"labels":["a"]}"#;
        assert!(matches!(parse_jnr(text.as_bytes()).unwrap().to_data(1e-8), Err(CliError::Validation(_))));
    }

    #[test]
    fn complex_arguments() {
        assert_eq!(parse_complex("1.5,-2").unwrap(), Complex::new(1.5, -2.0));
        assert!(parse_complex("1.5").is_err());
    }

    #[test]
    fn curve_shape_is_checked() {
        let doc = CurveDocument { version: 1, n: 1, coefficients: vec![vec![[0.0, 0.0]; 2], vec![[0.0, 0.0]; 1]] };
        assert!(matches!(doc.to_curve(), Err(CliError::Validation(_))));
    }
}
