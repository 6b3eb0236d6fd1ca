//! JSON schemas for the file formats the tools consume and emit.
//!
//! Complex values are `[re, im]` pairs; signals and tables are flat arrays
//! in lexicographic element order; kernels are row-major with the row
//! indexing the output variable.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, Signal};
use crate::heisenberg::{Cocycle, PhasePoint};
use crate::limitops::{AxisLimits, BandedZOperator, Diagonal, TailClass};
use crate::linalg::CMatrix;
use crate::opalg::KernelOperator;

pub type ComplexPair = [f64; 2];

fn to_pair(z: Complex<f64>) -> ComplexPair {
    [z.re, z.im]
}

fn from_pair(p: ComplexPair) -> Complex<f64> {
    Complex::new(p[0], p[1])
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

/// `{"orders": [n1, ..., nk]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupDto {
    pub orders: Vec<usize>,
}

impl GroupDto {
    pub fn to_group(&self) -> Result<FiniteAbelianGroup> {
        FiniteAbelianGroup::new(self.orders.clone())
    }

    pub fn from_group(g: &FiniteAbelianGroup) -> Self {
        GroupDto {
            orders: g.orders().to_vec(),
        }
    }
}

pub fn group_from_json(s: &str) -> Result<FiniteAbelianGroup> {
    let dto: GroupDto = serde_json::from_str(s).map_err(parse_err)?;
    dto.to_group()
}

pub fn signal_to_pairs(s: &Signal<f64>) -> Vec<ComplexPair> {
    s.values().iter().map(|&z| to_pair(z)).collect()
}

pub fn signal_from_pairs(pairs: &[ComplexPair]) -> Signal<f64> {
    Signal::new(pairs.iter().map(|&p| from_pair(p)).collect())
}

/// `{"x": [...], "nu": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhasePointDto {
    pub x: Vec<i64>,
    pub nu: Vec<i64>,
}

impl PhasePointDto {
    pub fn to_point(&self, g: &FiniteAbelianGroup) -> Result<PhasePoint> {
        Ok(PhasePoint {
            x: g.element(&self.x)?,
            nu: g.dual_element(&self.nu)?,
        })
    }

    pub fn from_point(p: &PhasePoint) -> Self {
        PhasePointDto {
            x: p.x.residues().iter().map(|&r| r as i64).collect(),
            nu: p.nu.residues().iter().map(|&r| r as i64).collect(),
        }
    }
}

/// Cocycle data: the group plus an optional phase table in phase-space
/// order (absent means the standard cocycle).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocycleDto {
    pub group: GroupDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_table: Option<Vec<ComplexPair>>,
}

impl CocycleDto {
    pub fn to_cocycle(&self) -> Result<Cocycle<f64>> {
        let g = self.group.to_group()?;
        match &self.a_table {
            None => Ok(Cocycle::standard(g)),
            Some(pairs) => {
                let table = pairs.iter().map(|&p| from_pair(p)).collect();
                Cocycle::with_table(g, table, 1e-10)
            }
        }
    }
}

/// `{"group": {...}, "kernel": [[[re, im], ...], ...]}` with row = output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelDto {
    pub group: GroupDto,
    pub kernel: Vec<Vec<ComplexPair>>,
}

impl KernelDto {
    pub fn to_operator(&self) -> Result<KernelOperator<f64>> {
        let g = self.group.to_group()?;
        let n = g.cardinality();
        if self.kernel.len() != n || self.kernel.iter().any(|row| row.len() != n) {
            return Err(Error::ShapeMismatch {
                what: "kernel rows/columns",
                expected: n,
                found: self
                    .kernel
                    .iter()
                    .map(Vec::len)
                    .chain([self.kernel.len()])
                    .max()
                    .unwrap_or(0),
            });
        }
        let m = CMatrix::from_fn(n, n, |r, c| from_pair(self.kernel[r][c]));
        KernelOperator::new(g, m)
    }

    pub fn from_operator(a: &KernelOperator<f64>) -> Self {
        let n = a.group().cardinality();
        KernelDto {
            group: GroupDto::from_group(a.group()),
            kernel: (0..n)
                .map(|r| (0..n).map(|c| to_pair(a.kernel()[(r, c)])).collect())
                .collect(),
        }
    }
}

pub fn kernel_from_json(s: &str) -> Result<KernelOperator<f64>> {
    let dto: KernelDto = serde_json::from_str(s).map_err(parse_err)?;
    dto.to_operator()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitPairDto {
    pub neg: ComplexPair,
    pub pos: ComplexPair,
}

/// Tail descriptor: `{"class": "c0" | "convergent" | "periodic" | "unstructured", ...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailDto {
    pub class: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limits: Option<Vec<LimitPairDto>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<Vec<usize>>,
}

impl TailDto {
    pub fn to_tail(&self) -> Result<TailClass<f64>> {
        match self.class.as_str() {
            "c0" => Ok(TailClass::C0),
            "convergent" => {
                let limits = self.limits.as_ref().ok_or_else(|| {
                    Error::Parse("convergent tail requires a \"limits\" array".into())
                })?;
                Ok(TailClass::Convergent {
                    limits: limits
                        .iter()
                        .map(|l| AxisLimits {
                            neg: from_pair(l.neg),
                            pos: from_pair(l.pos),
                        })
                        .collect(),
                })
            }
            "periodic" => {
                let period = self.period.as_ref().ok_or_else(|| {
                    Error::Parse("periodic tail requires a \"period\" array".into())
                })?;
                Ok(TailClass::Periodic {
                    period: period.clone(),
                })
            }
            "unstructured" => Ok(TailClass::Unstructured),
            other => Err(Error::Parse(format!("unknown tail class {other:?}"))),
        }
    }

    pub fn from_tail(t: &TailClass<f64>) -> Self {
        match t {
            TailClass::C0 => TailDto {
                class: "c0".into(),
                limits: None,
                period: None,
            },
            TailClass::Convergent { limits } => TailDto {
                class: "convergent".into(),
                limits: Some(
                    limits
                        .iter()
                        .map(|l| LimitPairDto {
                            neg: to_pair(l.neg),
                            pos: to_pair(l.pos),
                        })
                        .collect(),
                ),
                period: None,
            },
            TailClass::Periodic { period } => TailDto {
                class: "periodic".into(),
                limits: None,
                period: Some(period.clone()),
            },
            TailClass::Unstructured => TailDto {
                class: "unstructured".into(),
                limits: None,
                period: None,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagonalDto {
    pub offset: Vec<i64>,
    pub values: Vec<ComplexPair>,
    pub tail: TailDto,
}

/// `{"d": ..., "N": ..., "diagonals": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandedDto {
    pub d: usize,
    #[serde(rename = "N")]
    pub radius: i64,
    pub diagonals: Vec<DiagonalDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_tol: Option<f64>,
}

impl BandedDto {
    pub fn to_operator(&self) -> Result<BandedZOperator<f64>> {
        let diagonals = self
            .diagonals
            .iter()
            .map(|d| {
                Ok(Diagonal {
                    offset: d.offset.clone(),
                    values: d.values.iter().map(|&p| from_pair(p)).collect(),
                    tail: d.tail.to_tail()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        BandedZOperator::new(
            self.d,
            self.radius,
            diagonals,
            self.tail_tol.unwrap_or(1e-6),
        )
    }

    pub fn from_operator(b: &BandedZOperator<f64>) -> Self {
        BandedDto {
            d: b.dim(),
            radius: b.radius(),
            diagonals: b
                .diagonals()
                .iter()
                .map(|d| DiagonalDto {
                    offset: d.offset.clone(),
                    values: d.values.iter().map(|&z| to_pair(z)).collect(),
                    tail: TailDto::from_tail(&d.tail),
                })
                .collect(),
            tail_tol: Some(b.tail_tol()),
        }
    }
}

pub fn banded_from_json(s: &str) -> Result<BandedZOperator<f64>> {
    let dto: BandedDto = serde_json::from_str(s).map_err(parse_err)?;
    dto.to_operator()
}

/// Coorbit norm report: `{"p": "2" | "inf", "value": ..., "window": ...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormReportDto {
    pub p: String,
    pub value: f64,
    pub window: String,
}

impl NormReportDto {
    pub fn from_report(report: &crate::coorbit::CoorbitNormReport<f64>) -> Self {
        let p = match report.p {
            crate::group::LpExponent::Finite(v) => format!("{v}"),
            crate::group::LpExponent::Infinity => "inf".into(),
        };
        NormReportDto {
            p,
            value: report.value,
            window: report.window.clone(),
        }
    }
}
