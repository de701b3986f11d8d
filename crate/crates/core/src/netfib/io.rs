//! JSON documents for nets, cubic forms and (2,2)-forms.

use serde::{Deserialize, Serialize};

use super::{CubicForm, QuadricNet, VerraForm};
use crate::error::{Error, Result};

/// Version stamped on every machine-readable document this crate writes.
pub const FORMAT_VERSION: u32 = 1;

fn default_version() -> u32 {
    FORMAT_VERSION
}

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::Input(format!("unsupported format_version {v}")));
    }
    Ok(())
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed document: {e}")))
}

/// `{n, m, matrices}` with each matrix flattened row-major; an optional
/// integer point of `X` may ride along.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetFile {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub n: usize,
    pub m: usize,
    pub matrices: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<i64>>,
}

impl NetFile {
    pub fn from_json(text: &str) -> Result<Self> {
        parse(text)
    }

    pub fn from_net(net: &QuadricNet, point: Option<Vec<i64>>) -> Self {
        NetFile {
            format_version: FORMAT_VERSION,
            n: net.n(),
            m: net.m(),
            matrices: net.matrices().iter().map(|mat| mat.concat()).collect(),
            point,
        }
    }

    pub fn to_net(&self) -> Result<QuadricNet> {
        check_version(self.format_version)?;
        let size = self.n + 2;
        let mats = self
            .matrices
            .iter()
            .enumerate()
            .map(|(k, flat)| {
                if flat.len() != size * size {
                    return Err(Error::Input(format!(
                        "matrix {k} has {} entries, expected {}",
                        flat.len(),
                        size * size
                    )));
                }
                Ok(flat.chunks(size).map(|r| r.to_vec()).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        let net = QuadricNet::new(self.n, self.m, mats)?;
        if let Some(p) = &self.point {
            if p.len() != size {
                return Err(Error::Input(format!(
                    "point has {} coordinates, expected {size}",
                    p.len()
                )));
            }
        }
        Ok(net)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubicTerm {
    pub exponents: Vec<u32>,
    pub coefficient: i64,
}

/// Monomial list of a cubic form in `x0..x5`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubicFile {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub variables: usize,
    pub degree: u32,
    pub terms: Vec<CubicTerm>,
}

impl CubicFile {
    pub fn from_json(text: &str) -> Result<Self> {
        parse(text)
    }

    pub fn from_cubic(cubic: &CubicForm) -> Self {
        CubicFile {
            format_version: FORMAT_VERSION,
            variables: 6,
            degree: 3,
            terms: cubic
                .terms()
                .into_iter()
                .map(|(exponents, coefficient)| CubicTerm {
                    exponents,
                    coefficient,
                })
                .collect(),
        }
    }

    pub fn to_cubic(&self) -> Result<CubicForm> {
        check_version(self.format_version)?;
        if self.variables != 6 || self.degree != 3 {
            return Err(Error::Input(format!(
                "expected a cubic in 6 variables, got degree {} in {}",
                self.degree, self.variables
            )));
        }
        let terms: Vec<(Vec<u32>, i64)> = self
            .terms
            .iter()
            .map(|t| (t.exponents.clone(), t.coefficient))
            .collect();
        CubicForm::new(&terms)
    }
}

/// Variable order of the flattened (2,2)-tensor.
pub const VERRA_VARIABLE_ORDER: [&str; 6] = ["s0", "s1", "s2", "t0", "t1", "t2"];

/// `coefficients[((i*3 + j)*3 + k)*3 + l]` multiplies `s_i s_j t_k t_l`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerraFile {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub variable_order: Vec<String>,
    pub coefficients: Vec<i64>,
}

impl VerraFile {
    pub fn from_json(text: &str) -> Result<Self> {
        parse(text)
    }

    pub fn from_form(form: &VerraForm) -> Self {
        VerraFile {
            format_version: FORMAT_VERSION,
            variable_order: VERRA_VARIABLE_ORDER.iter().map(|s| s.to_string()).collect(),
            coefficients: form.coefficients().to_vec(),
        }
    }

    pub fn to_form(&self) -> Result<VerraForm> {
        check_version(self.format_version)?;
        if self
            .variable_order
            .iter()
            .map(String::as_str)
            .ne(VERRA_VARIABLE_ORDER)
        {
            return Err(Error::Input(format!(
                "variable_order must be {:?}",
                VERRA_VARIABLE_ORDER
            )));
        }
        VerraForm::new(self.coefficients.clone())
    }
}
