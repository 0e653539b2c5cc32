//! JSON and CSV representations of the engine's data.
//!
//! * Coframe: `{"dim": n, "labels": [...], "d": {"k": [[i, j, value], ...]}, "s_index": m|null}`
//!   where each triple adds `value · eⁱ∧eʲ` to `d eᵏ`.
//! * Form: `{"grade": k, "coeffs": {"i,j,...": [val, dds]}}`; the dimension
//!   comes from the enclosing object.
//! * Reduced data, flow models and residual reports are documented on their
//!   types below.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use nk_flow_core::evolution::{EvolutionState, SpatialGradients};
use nk_flow_core::exterior::{Blade, Coframe};
use nk_flow_core::reduction::{OrbitGram, ReducedData};
use nk_flow_core::{Form, Jet, Residual};

use crate::error::{AppError, AppResult};

fn bad(msg: impl Into<String>) -> AppError {
    AppError::Model(msg.into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoframeJson {
    pub dim: usize,
    pub labels: Vec<String>,
    #[serde(default)]
    pub d: BTreeMap<String, Vec<(usize, usize, f64)>>,
    #[serde(default)]
    pub s_index: Option<usize>,
}

impl From<&Coframe> for CoframeJson {
    fn from(frame: &Coframe) -> Self {
        let mut d = BTreeMap::new();
        for k in 0..frame.dim() {
            let triples: Vec<(usize, usize, f64)> = frame
                .d_basis(k)
                .terms()
                .map(|(b, c)| {
                    let mut idx = b.indices();
                    (idx.next().expect("two-form"), idx.next().expect("two-form"), c.val)
                })
                .collect();
            if !triples.is_empty() {
                d.insert(k.to_string(), triples);
            }
        }
        CoframeJson { dim: frame.dim(), labels: frame.labels().to_vec(), d, s_index: frame.s_index() }
    }
}

impl CoframeJson {
    pub fn to_coframe(&self) -> AppResult<Coframe> {
        if self.labels.len() != self.dim {
            return Err(bad(format!("coframe has dim {} but {} labels", self.dim, self.labels.len())));
        }
        let mut constants = Vec::new();
        for (k, triples) in &self.d {
            let k: usize = k.parse().map_err(|_| bad(format!("coframe key {k:?} is not an index")))?;
            constants.extend(triples.iter().map(|&(i, j, c)| (k, i, j, c)));
        }
        let labels: Vec<&str> = self.labels.iter().map(String::as_str).collect();
        Ok(Coframe::from_constants(&labels, &constants, self.s_index)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormJson {
    pub grade: usize,
    pub coeffs: BTreeMap<String, [f64; 2]>,
}

impl From<&Form> for FormJson {
    fn from(w: &Form) -> Self {
        let coeffs = w
            .terms()
            .map(|(b, c)| {
                let key = b.indices().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
                (key, [c.val, c.dds])
            })
            .collect();
        FormJson { grade: w.grade(), coeffs }
    }
}

impl FormJson {
    pub fn to_form(&self, dim: usize) -> AppResult<Form> {
        let mut w = Form::try_zero(dim, self.grade)?;
        for (key, [val, dds]) in &self.coeffs {
            let idx: Vec<usize> = if key.is_empty() {
                Vec::new()
            } else {
                key.split(',').map(|t| t.trim().parse().map_err(|_| bad(format!("bad index tuple {key:?}")))).collect::<AppResult<_>>()?
            };
            if idx.len() != self.grade || idx.iter().any(|&i| i >= dim) {
                return Err(bad(format!("index tuple {key:?} does not fit grade {} in dimension {dim}", self.grade)));
            }
            let blade = Blade::from_indices(&idx).map_err(|_| bad(format!("index tuple {key:?} must be strictly increasing")))?;
            w.add_term(blade, Jet::new(*val, *dds));
        }
        Ok(w)
    }
}

/// `{"s", "G": [[[v,d],[v,d]],[[v,d],[v,d]]], "frame3", "alpha": [3 forms], "theta": [2 forms], "f": [v,d]|null}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedDataJson {
    pub s: f64,
    #[serde(rename = "G")]
    pub g: [[[f64; 2]; 2]; 2],
    pub frame3: CoframeJson,
    pub alpha: [FormJson; 3],
    pub theta: [FormJson; 2],
    #[serde(default)]
    pub f: Option<[f64; 2]>,
}

fn jet(p: [f64; 2]) -> Jet {
    Jet::new(p[0], p[1])
}

impl From<&ReducedData> for ReducedDataJson {
    fn from(r: &ReducedData) -> Self {
        let p = |j: Jet| [j.val, j.dds];
        let OrbitGram { uu, uv, vv } = r.gram;
        ReducedDataJson {
            s: r.s,
            g: [[p(uu), p(uv)], [p(uv), p(vv)]],
            frame3: CoframeJson::from(&r.frame3),
            alpha: [0, 1, 2].map(|i| FormJson::from(&r.alpha[i])),
            theta: [0, 1].map(|k| FormJson::from(&r.theta[k])),
            f: Some(p(r.f)),
        }
    }
}

impl ReducedDataJson {
    pub fn to_reduced(&self) -> AppResult<ReducedData> {
        if self.g[0][1] != self.g[1][0] {
            return Err(bad("G must be symmetric"));
        }
        let frame3 = self.frame3.to_coframe()?;
        let dim = frame3.dim();
        let alpha = [self.alpha[0].to_form(dim)?, self.alpha[1].to_form(dim)?, self.alpha[2].to_form(dim)?];
        let theta = [self.theta[0].to_form(dim)?, self.theta[1].to_form(dim)?];
        let gram = OrbitGram::new(jet(self.g[0][0]), jet(self.g[0][1]), jet(self.g[1][1]));
        let data = ReducedData::new(self.s, gram, frame3, alpha, theta)?;
        if let Some(f) = self.f {
            if (f[0] - data.f.val).abs() > 1e-9 * data.f.val.abs() {
                return Err(bad(format!("declared f = {} but 4h²/(h²−s²) = {}", f[0], data.f.val)));
            }
        }
        Ok(data)
    }
}

/// Constant spatial derivatives `X_i(q)` injected into a model.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GradientsJson {
    #[serde(default)]
    pub h2: [f64; 3],
    #[serde(default)]
    pub uu: [f64; 3],
    #[serde(default)]
    pub uv: [f64; 3],
    #[serde(default)]
    pub vv: [f64; 3],
}

impl From<GradientsJson> for SpatialGradients {
    fn from(g: GradientsJson) -> Self {
        SpatialGradients { h2: g.h2, uu: g.uu, uv: g.uv, vv: g.vv }
    }
}

/// `{"frame3", "alpha0": [3], "alpha1": [3], "alpha2": [3], "G0": [[uu,uv],[uv,vv]],
///   "f": real|null, "s0": real|null, "periods_integral": bool, "gradients": {...}|absent}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelJson {
    pub frame3: CoframeJson,
    pub alpha0: [f64; 3],
    pub alpha1: [f64; 3],
    pub alpha2: [f64; 3],
    #[serde(rename = "G0")]
    pub g0: [[f64; 2]; 2],
    #[serde(default)]
    pub f: Option<f64>,
    #[serde(default)]
    pub s0: Option<f64>,
    pub periods_integral: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradients: Option<GradientsJson>,
}

impl ModelJson {
    pub fn initial_state(&self, frame3: &Coframe) -> AppResult<EvolutionState> {
        if self.g0[0][1] != self.g0[1][0] {
            return Err(bad("G0 must be symmetric"));
        }
        let gram = [self.g0[0][0], self.g0[0][1], self.g0[1][1]];
        Ok(EvolutionState::initial(frame3, [self.alpha0, self.alpha1, self.alpha2], gram, self.f, self.s0)?)
    }
}

/// Either kind of input file accepted by `--model`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelFile {
    Flow(ModelJson),
    Reduced(ReducedDataJson),
}

/// `{"check": name, "residual": value, "s": value}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualJson {
    pub check: String,
    pub residual: f64,
    pub s: Option<f64>,
}

impl From<&Residual> for ResidualJson {
    fn from(r: &Residual) -> Self {
        ResidualJson { check: r.check.to_string(), residual: r.residual, s: r.s }
    }
}

/// Full double precision, shortest round-trip representation (at most 17
/// significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub const TRAJECTORY_HEADER: [&str; 22] = [
    "s", "g_UU", "g_UV", "g_VV", "h2", "alpha0_0", "alpha0_1", "alpha0_2", "alpha1_0", "alpha1_1", "alpha1_2", "alpha2_0", "alpha2_1", "alpha2_2", "theta1_0", "theta1_1", "theta1_2", "theta2_0", "theta2_1", "theta2_2", "nk_r1", "nk_r2",
];

/// One trajectory row: the state plus the residuals of its assembled structure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub s: f64,
    pub g_uu: f64,
    pub g_uv: f64,
    pub g_vv: f64,
    pub h2: f64,
    pub alpha: [[f64; 3]; 3],
    pub theta: [[f64; 3]; 2],
    pub nk_r1: f64,
    pub nk_r2: f64,
}

impl TrajectoryRow {
    pub fn new(st: &EvolutionState, nk: (f64, f64)) -> Self {
        TrajectoryRow {
            s: st.s,
            g_uu: st.gram[0],
            g_uv: st.gram[1],
            g_vv: st.gram[2],
            h2: st.h2(),
            alpha: st.alpha,
            theta: st.theta,
            nk_r1: nk.0,
            nk_r2: nk.1,
        }
    }

    pub fn fields(&self) -> Vec<f64> {
        let mut v = vec![self.s, self.g_uu, self.g_uv, self.g_vv, self.h2];
        v.extend(self.alpha.iter().flatten());
        v.extend(self.theta.iter().flatten());
        v.extend([self.nk_r1, self.nk_r2]);
        v
    }

    pub fn from_fields(v: &[f64]) -> AppResult<Self> {
        if v.len() != TRAJECTORY_HEADER.len() {
            return Err(bad(format!("trajectory row has {} fields, expected {}", v.len(), TRAJECTORY_HEADER.len())));
        }
        let a = |i: usize| [v[i], v[i + 1], v[i + 2]];
        Ok(TrajectoryRow {
            s: v[0],
            g_uu: v[1],
            g_uv: v[2],
            g_vv: v[3],
            h2: v[4],
            alpha: [a(5), a(8), a(11)],
            theta: [a(14), a(17)],
            nk_r1: v[20],
            nk_r2: v[21],
        })
    }
}

pub fn write_trajectory_csv<W: Write>(out: W, rows: &[TrajectoryRow]) -> AppResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for row in rows {
        w.write_record(row.fields().iter().map(|x| fmt_f64(*x)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trajectory_csv<R: std::io::Read>(input: R) -> AppResult<Vec<TrajectoryRow>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let v: Vec<f64> = rec.iter().map(|t| t.parse().map_err(|_| bad(format!("bad number {t:?}")))).collect::<AppResult<_>>()?;
        rows.push(TrajectoryRow::from_fields(&v)?);
    }
    Ok(rows)
}

/// Tidy `s, quantity, value` rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TidyRow {
    pub s: f64,
    pub quantity: String,
    pub value: f64,
}

pub fn write_tidy_csv<W: Write>(out: W, rows: &[TidyRow]) -> AppResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["s", "quantity", "value"])?;
    for row in rows {
        w.write_record([fmt_f64(row.s), row.quantity.clone(), fmt_f64(row.value)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_precision_formatting() {
        let x = 0.1 + 0.2;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        assert_eq!(fmt_f64(2.0), "2.0");
    }

    #[test]
    fn coframe_json_layout() {
        let json = r#"{"dim": 3, "labels": ["a", "b", "c"], "d": {"0": [[1, 2, 1.0]]}, "s_index": null}"#;
        let frame = serde_json::from_str::<CoframeJson>(json).unwrap().to_coframe().unwrap();
        assert_eq!(frame.d_basis(0).coeff(&[1, 2]).val, 1.0);
        assert_eq!(CoframeJson::from(&frame).to_coframe().unwrap(), frame);
    }

    #[test]
    fn form_json_rejects_unsorted_tuples() {
        let json = r#"{"grade": 2, "coeffs": {"2,1": [1.0, 0.0]}}"#;
        assert!(serde_json::from_str::<FormJson>(json).unwrap().to_form(3).is_err());
        let json = r#"{"grade": 0, "coeffs": {"": [2.0, 1.0]}}"#;
        assert_eq!(serde_json::from_str::<FormJson>(json).unwrap().to_form(3).unwrap().scalar_value(), Jet::new(2.0, 1.0));
    }
}
