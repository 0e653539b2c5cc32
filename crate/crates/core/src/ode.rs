//! Fixed-step explicit integrators on flat `f64` state vectors.

use alloc::vec::Vec;

use crate::error::Result;

/// Right-hand side `y' = F(t, y)`; may fail (e.g. near a pole).
pub trait OdeSystem {
    fn rhs(&self, t: f64, y: &[f64], out: &mut [f64]) -> Result<()>;
}

impl<F> OdeSystem for F
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    fn rhs(&self, t: f64, y: &[f64], out: &mut [f64]) -> Result<()> {
        self(t, y, out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    Euler,
    #[default]
    Rk4,
}

impl Method {
    pub fn order(self) -> u32 {
        match self {
            Method::Euler => 1,
            Method::Rk4 => 4,
        }
    }
}

fn axpy(y: &[f64], h: f64, k: &[f64], out: &mut [f64]) {
    for ((o, a), b) in out.iter_mut().zip(y).zip(k) {
        *o = a + h * b;
    }
}

/// One step of size `h` from `(t, y)`, writing the new state into `y`.
pub fn step<S: OdeSystem + ?Sized>(sys: &S, method: Method, t: f64, h: f64, y: &mut [f64]) -> Result<()> {
    let n = y.len();
    match method {
        Method::Euler => {
            let mut k = alloc::vec![0.0; n];
            sys.rhs(t, y, &mut k)?;
            for (yi, ki) in y.iter_mut().zip(&k) {
                *yi += h * ki;
            }
        }
        Method::Rk4 => {
            let mut k1 = alloc::vec![0.0; n];
            let mut k2 = alloc::vec![0.0; n];
            let mut k3 = alloc::vec![0.0; n];
            let mut k4 = alloc::vec![0.0; n];
            let mut tmp = alloc::vec![0.0; n];
            sys.rhs(t, y, &mut k1)?;
            axpy(y, 0.5 * h, &k1, &mut tmp);
            sys.rhs(t + 0.5 * h, &tmp, &mut k2)?;
            axpy(y, 0.5 * h, &k2, &mut tmp);
            sys.rhs(t + 0.5 * h, &tmp, &mut k3)?;
            axpy(y, h, &k3, &mut tmp);
            sys.rhs(t + h, &tmp, &mut k4)?;
            for i in 0..n {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
    }
    Ok(())
}

/// Integrates from `t0` to `t1` in `steps` equal steps and returns every
/// node `(t, y)`, including the initial one.
pub fn integrate<S: OdeSystem + ?Sized>(sys: &S, method: Method, t0: f64, t1: f64, y0: &[f64], steps: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let steps = steps.max(1);
    let h = (t1 - t0) / steps as f64;
    let mut y = y0.to_vec();
    let mut out = Vec::with_capacity(steps + 1);
    out.push((t0, y.clone()));
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        step(sys, method, t, h, &mut y)?;
        out.push((t0 + (i + 1) as f64 * h, y.clone()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(_t: f64, y: &[f64], out: &mut [f64]) -> Result<()> {
        out[0] = -2.0 * y[0];
        Ok(())
    }

    fn final_error(method: Method, steps: usize) -> f64 {
        let path = integrate(&decay, method, 0.0, 1.0, &[1.0], steps).unwrap();
        (path.last().unwrap().1[0] - libm::exp(-2.0)).abs()
    }

    #[test]
    fn convergence_orders() {
        for method in [Method::Euler, Method::Rk4] {
            let e1 = final_error(method, 50);
            let e2 = final_error(method, 100);
            let observed = libm::log2(e1 / e2);
            assert!((observed - method.order() as f64).abs() < 0.15, "{method:?}: {observed}");
        }
    }

    #[test]
    fn node_layout() {
        let path = integrate(&decay, Method::Rk4, 1.0, 2.0, &[1.0], 4).unwrap();
        assert_eq!(path.len(), 5);
        assert_eq!(path[4].0, 2.0);
    }
}
