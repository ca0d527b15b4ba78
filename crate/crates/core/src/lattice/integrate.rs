use super::LatticeState;
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Classical fourth-order Runge-Kutta stepper with reusable stage buffers.
#[derive(Debug, Clone)]
pub struct Rk4<S: LatticeState> {
    k: S,
    acc: S,
    tmp: S,
}

impl<S: LatticeState> Rk4<S> {
    pub fn new(template: &S) -> Self {
        let g = *template.grid();
        Self { k: S::zeros(g), acc: S::zeros(g), tmp: S::zeros(g) }
    }

    /// Advances `state` by `dt` in place. On a non-finite result the state is left at the
    /// last finite values and a blow-up error is returned.
    pub fn step(&mut self, state: &mut S, params: &ModelParams, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("time step must be positive, got {dt}")));
        }
        if self.k.grid() != state.grid() {
            *self = Self::new(state);
        }
        let t0 = state.time();

        state.rhs_into(params, &mut self.k)?;
        combine(&mut self.acc, state, dt / 6.0, &self.k);
        combine(&mut self.tmp, state, dt / 2.0, &self.k);
        self.tmp.set_time(t0 + dt / 2.0);

        self.tmp.rhs_into(params, &mut self.k)?;
        accumulate(&mut self.acc, dt / 3.0, &self.k);
        combine(&mut self.tmp, state, dt / 2.0, &self.k);

        self.tmp.rhs_into(params, &mut self.k)?;
        accumulate(&mut self.acc, dt / 3.0, &self.k);
        combine(&mut self.tmp, state, dt, &self.k);
        self.tmp.set_time(t0 + dt);

        self.tmp.rhs_into(params, &mut self.k)?;
        accumulate(&mut self.acc, dt / 6.0, &self.k);

        if !self.acc.all_finite() {
            return Err(Error::BlowUp { what: "lattice".into(), last_finite_time: t0 });
        }
        std::mem::swap(state, &mut self.acc);
        state.set_time(t0 + dt);
        Ok(())
    }
}

/// One RK4 step without buffer reuse.
pub fn step<S: LatticeState>(state: &S, params: &ModelParams, dt: f64) -> Result<S> {
    let mut out = state.clone();
    Rk4::new(state).step(&mut out, params, dt)?;
    Ok(out)
}

fn combine<S: LatticeState>(out: &mut S, y: &S, h: f64, k: &S) {
    for ((o, y), k) in out.fields_mut().into_iter().zip(y.fields()).zip(k.fields()) {
        for ((o, y), k) in o.iter_mut().zip(y).zip(k) {
            *o = y + h * k;
        }
    }
}

fn accumulate<S: LatticeState>(out: &mut S, h: f64, k: &S) {
    for (o, k) in out.fields_mut().into_iter().zip(k.fields()) {
        for (o, k) in o.iter_mut().zip(k) {
            *o += h * k;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{GridSpec, LatticeStateH};

    #[test]
    fn zero_state_stays_zero() {
        let s = LatticeStateH::zeros(GridSpec::new(6, 4).unwrap());
        let p = ModelParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let out = step(&s, &p, 0.3).unwrap();
        assert!(out.fields().iter().all(|f| f.iter().all(|&v| v == 0.0)));
        assert!((out.t - 0.3).abs() < 1e-15);
    }

    #[test]
    fn blow_up_reports_time() {
        let mut s = LatticeStateH::zeros(GridSpec::new(4, 4).unwrap());
        s.u1[0] = 1e200;
        s.t = 2.5;
        let p = ModelParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        match step(&s, &p, 0.1) {
            Err(Error::BlowUp { last_finite_time, .. }) => assert_eq!(last_finite_time, 2.5),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_dt() {
        let s = LatticeStateH::zeros(GridSpec::new(4, 4).unwrap());
        let p = ModelParams::new(1.0, 1.0, 0.0, 0.0).unwrap();
        assert!(step(&s, &p, 0.0).is_err());
        assert!(step(&s, &p, f64::NAN).is_err());
    }
}
