use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{Blade, Form, MAX_DIM};
use crate::error::{Error, Result};
use crate::jet::Jet;

/// Tolerance used by [`check_d_squared`].
const D_SQUARED_TOL: f64 = 1e-12;

/// An ordered coframe `e⁰ … eⁿ⁻¹` together with `d eᵏ` for every basis
/// one-form.
///
/// `d eᵏ` is stored directly as a two-form (no `−½ cᵏᵢⱼ` convention).
/// When `s_index` is set, that basis element is the coordinate one-form `ds`
/// and [`ext_d`] adds `ds ∧ ∂ₛ(coefficient)` for every term.
#[derive(Clone, Debug, PartialEq)]
pub struct Coframe {
    labels: Vec<String>,
    structure: Vec<Form>,
    s_index: Option<usize>,
}

impl Coframe {
    pub fn new(labels: Vec<String>, structure: Vec<Form>, s_index: Option<usize>) -> Result<Self> {
        let dim = labels.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::DimensionMismatch { expected: MAX_DIM, found: dim });
        }
        if structure.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: structure.len() });
        }
        for d in &structure {
            if d.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: d.dim() });
            }
            if d.grade() != 2 && !(dim == 1 && d.is_empty()) {
                return Err(Error::GradeMismatch { expected: 2, found: d.grade() });
            }
        }
        if s_index.is_some_and(|k| k >= dim) {
            return Err(Error::InvalidIndex);
        }
        Ok(Coframe { labels, structure, s_index })
    }

    /// Frame from a list of constants `(k, i, j, c)` meaning
    /// `d eᵏ += c · eⁱ ∧ eʲ`.
    pub fn from_constants(labels: &[&str], constants: &[(usize, usize, usize, f64)], s_index: Option<usize>) -> Result<Self> {
        let dim = labels.len();
        let mut structure: Vec<Form> = (0..dim).map(|_| Form::zero(dim, 2.min(dim))).collect();
        for &(k, i, j, c) in constants {
            if k >= dim || i >= dim || j >= dim || i == j {
                return Err(Error::InvalidIndex);
            }
            structure[k].add_unsorted(&[i, j], Jet::constant(c))?;
        }
        Coframe::new(labels.iter().map(|l| l.to_string()).collect(), structure, s_index)
    }

    /// A frame with `d eᵏ = 0` for all `k`.
    pub fn abelian(labels: &[&str], s_index: Option<usize>) -> Result<Self> {
        Coframe::from_constants(labels, &[], s_index)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn s_index(&self) -> Option<usize> {
        self.s_index
    }

    /// `d eᵏ`.
    pub fn d_basis(&self, k: usize) -> &Form {
        &self.structure[k]
    }

    pub fn structure(&self) -> &[Form] {
        &self.structure
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

fn structure_part(w: &Form, frame: &Coframe, out: &mut Form) {
    for (blade, c) in w.terms() {
        for i in blade.indices() {
            let dei = frame.d_basis(i);
            if dei.is_empty() {
                continue;
            }
            // e^I = sign · eⁱ ∧ e^{I∖i}, hence d e^I ∋ sign · d eⁱ ∧ e^{I∖i}
            let (sign, rest) = blade.remove(i).expect("index present");
            for (two, v) in dei.terms() {
                if let Some((sign2, target)) = two.wedge(rest) {
                    out.add_term(target, (c * v).scale(sign * sign2));
                }
            }
        }
    }
}

fn check_frame(w: &Form, frame: &Coframe) -> Result<()> {
    if w.dim() != frame.dim() {
        return Err(Error::DimensionMismatch { expected: frame.dim(), found: w.dim() });
    }
    if w.grade() >= frame.dim() {
        return Err(Error::GradeOverflow { grade: w.grade() + 1, dim: frame.dim() });
    }
    Ok(())
}

/// Exterior derivative: the structure part plus, when the frame has a `ds`
/// label, the `s`-channel `Σ ∂ₛc_I ds ∧ e^I`.
///
/// Second `s`-derivatives are not tracked: the `s`-channel coefficients are
/// returned with a zero `dds`.
pub fn ext_d(w: &Form, frame: &Coframe) -> Result<Form> {
    let mut out = ext_d_structure(w, frame)?;
    if let Some(k) = frame.s_index() {
        let ds = Blade::single(k);
        for (blade, c) in w.terms() {
            if c.dds == 0.0 {
                continue;
            }
            if let Some((sign, target)) = ds.wedge(blade) {
                out.add_term(target, Jet::constant(sign * c.dds));
            }
        }
    }
    Ok(out)
}

/// Exterior derivative ignoring the `s`-channel.
pub fn ext_d_structure(w: &Form, frame: &Coframe) -> Result<Form> {
    check_frame(w, frame)?;
    let mut out = Form::zero(frame.dim(), w.grade() + 1);
    structure_part(w, frame, &mut out);
    Ok(out)
}

/// Largest coefficient of `d(d eᵏ)` over all basis one-forms.
pub fn d_squared_defect(frame: &Coframe) -> f64 {
    if frame.dim() < 3 {
        return 0.0;
    }
    frame
        .structure()
        .iter()
        .map(|d| ext_d_structure(d, frame).map(|dd| dd.max_abs()).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max)
}

/// `true` iff the structure-part `d ∘ d` annihilates every basis one-form
/// (the Jacobi identity for the structure constants).
pub fn check_d_squared(frame: &Coframe) -> bool {
    let scale = frame.structure().iter().map(Form::max_abs).fold(1.0, f64::max);
    d_squared_defect(frame) <= D_SQUARED_TOL * scale * scale
}
