//! Measure of `{x : Λ_f(x) >= t}` by running extrema.
//!
//! With `u = f - t·x` and `w = f + t·x`, a point `x` has a chord of slope at
//! least `t` exactly when one of these holds:
//!
//! * some `x' > x` has `u(x') >= u(x)`,
//! * some `x' < x` has `u(x') <= u(x)`,
//! * some `x' > x` has `w(x') <= w(x)`,
//! * some `x' < x` has `w(x') >= w(x)`.
//!
//! On each cell the first and third sets are suffixes of the cell and the
//! other two are prefixes, with endpoints given by one linear equation against
//! a running maximum or minimum. This yields the measure exactly in `O(n)`
//! per level, up to a finite set of boundary points. Suprema that are only
//! approached (step functions) change the sets at finitely many points and
//! so never the measure.

use crate::func_model::Function;
use crate::rational::{Rational, Scalar};

/// A function that is linear on each open cell `(x_i, x_{i+1})`, with
/// independent values at the nodes. Both exact classes fit this form.
#[derive(Clone, Debug)]
pub(crate) struct Segmented<S> {
    pub xs: Vec<S>,
    /// Node values, one per node.
    pub point: Vec<S>,
    /// Limit at `x_i` from inside cell `i`.
    pub start: Vec<S>,
    /// Limit at `x_{i+1}` from inside cell `i`.
    pub end: Vec<S>,
}

impl<S: Scalar> Segmented<S> {
    pub fn from_function(f: &Function) -> Self {
        let conv = |v: &[Rational]| v.iter().map(S::from_rational).collect::<Vec<S>>();
        match f {
            Function::Plf(g) => {
                let vals = conv(g.values());
                let n = vals.len();
                Self {
                    xs: conv(g.breakpoints()),
                    start: vals[..n - 1].to_vec(),
                    end: vals[1..].to_vec(),
                    point: vals,
                }
            }
            Function::Step(g) => {
                let levels = conv(g.levels());
                Self {
                    xs: conv(g.nodes()),
                    point: conv(g.node_values()),
                    start: levels.clone(),
                    end: levels,
                }
            }
        }
    }

    pub fn cells(&self) -> usize {
        self.start.len()
    }

    /// Measure of `{x : Λ_f(x) >= t}` for `t > 0`.
    pub fn superlevel(&self, t: &S) -> S {
        let mut total = S::zero();
        self.visit(t, |cell| total = total.clone() + cell.measure());
        total
    }

    /// Runs the sweep at level `t`, handing each cell's four sets to `visit`.
    pub fn visit(&self, t: &S, mut visit: impl FnMut(CellParts<S>)) {
        let n = self.cells();
        let tilt = |v: &S, x: &S, sign: bool| {
            let tx = t.clone() * x.clone();
            if sign {
                v.clone() + tx
            } else {
                v.clone() - tx
            }
        };
        // Values of u = f - t·x and w = f + t·x.
        let u_pt: Vec<S> = (0..=n).map(|i| tilt(&self.point[i], &self.xs[i], false)).collect();
        let w_pt: Vec<S> = (0..=n).map(|i| tilt(&self.point[i], &self.xs[i], true)).collect();
        let u_start: Vec<S> = (0..n).map(|i| tilt(&self.start[i], &self.xs[i], false)).collect();
        let u_end: Vec<S> = (0..n).map(|i| tilt(&self.end[i], &self.xs[i + 1], false)).collect();
        let w_start: Vec<S> = (0..n).map(|i| tilt(&self.start[i], &self.xs[i], true)).collect();
        let w_end: Vec<S> = (0..n).map(|i| tilt(&self.end[i], &self.xs[i + 1], true)).collect();

        // Suffix sup of u and suffix inf of w over [x_{i+1}, 1], per cell.
        let mut u_sup_right = vec![S::zero(); n];
        let mut w_inf_right = vec![S::zero(); n];
        let mut u_sup = u_pt[n].clone();
        let mut w_inf = w_pt[n].clone();
        for i in (0..n).rev() {
            u_sup_right[i] = u_sup.clone();
            w_inf_right[i] = w_inf.clone();
            u_sup = S::max_of(S::max_of(u_sup, u_pt[i].clone()), S::max_of(u_start[i].clone(), u_end[i].clone()));
            w_inf = S::min_of(S::min_of(w_inf, w_pt[i].clone()), S::min_of(w_start[i].clone(), w_end[i].clone()));
        }

        let mut u_inf_left = u_pt[0].clone();
        let mut w_sup_left = w_pt[0].clone();
        for i in 0..n {
            let h = self.xs[i + 1].clone() - self.xs[i].clone();
            let (us, ue) = (&u_start[i], &u_end[i]);
            let (ws, we) = (&w_start[i], &w_end[i]);
            // u is strictly decreasing on the cell unless the slope is >= t,
            // w strictly increasing unless the slope is <= -t.
            let u_flat = us <= ue;
            let w_flat = ws >= we;
            let u_den = us.clone() - ue.clone();
            let w_den = we.clone() - ws.clone();
            visit(CellParts {
                // u(x) <= sup of u to the right
                suffix_u: Part { flat: u_flat, num: u_sup_right[i].clone() - ue.clone(), den: u_den.clone() },
                // u(x) >= inf of u to the left
                prefix_u: Part { flat: u_flat, num: us.clone() - u_inf_left.clone(), den: u_den },
                // w(x) >= inf of w to the right
                suffix_w: Part { flat: w_flat, num: we.clone() - w_inf_right[i].clone(), den: w_den.clone() },
                // w(x) <= sup of w to the left
                prefix_w: Part { flat: w_flat, num: w_sup_left.clone() - ws.clone(), den: w_den },
                h,
            });
            u_inf_left = S::min_of(S::min_of(u_inf_left, u_pt[i + 1].clone()), S::min_of(us.clone(), ue.clone()));
            w_sup_left = S::max_of(S::max_of(w_sup_left, w_pt[i + 1].clone()), S::max_of(ws.clone(), we.clone()));
        }
    }
}

/// Length of one of the four sets on a cell of width `h`: the whole cell
/// when `flat`, else `h·num/den` clamped to `[0, h]`.
///
/// As `t` grows, `num` never increases and `den` grows at rate `h`; the
/// interval bound in the weak search relies on both facts.
#[derive(Clone, Debug)]
pub(crate) struct Part<S> {
    pub flat: bool,
    pub num: S,
    pub den: S,
}

impl<S: Scalar> Part<S> {
    pub fn length(&self, h: &S) -> S {
        if self.flat || self.num >= self.den {
            h.clone()
        } else if !self.num.is_positive() {
            S::zero()
        } else {
            h.clone() * self.num.clone() / self.den.clone()
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct CellParts<S> {
    pub h: S,
    pub suffix_u: Part<S>,
    pub prefix_u: Part<S>,
    pub suffix_w: Part<S>,
    pub prefix_w: Part<S>,
}

impl<S: Scalar> CellParts<S> {
    /// Suffixes and prefixes each union to the longer one; a suffix and a
    /// prefix together cover at most the cell.
    pub fn measure(&self) -> S {
        let h = &self.h;
        let suffix = S::max_of(self.suffix_u.length(h), self.suffix_w.length(h));
        let prefix = S::max_of(self.prefix_u.length(h), self.prefix_w.length(h));
        S::min_of(h.clone(), suffix + prefix)
    }
}
