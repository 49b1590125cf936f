//! Seeded random instances. Polyhedra are built around a planted anchor point,
//! so they are nonempty by construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{int, Rational};
use crate::error::{Error, Result};
use crate::functions::PolyhedralFunction;
use crate::linalg::{dot, is_zero_vec, QMatrix, QVector};
use crate::lp::LpProblem;
use crate::polyhedron::HPolyhedron;
use crate::setvalued::PolyMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Profile {
    /// Upper bound on ambient dimensions.
    pub dims: usize,
    /// Upper bound on inequality rows.
    pub rows: usize,
    /// Coefficients are drawn from `[-bound, bound]`.
    pub bound: i64,
}

impl Default for Profile {
    fn default() -> Self {
        Profile {
            dims: 6,
            rows: 12,
            bound: 5,
        }
    }
}

/// Stateless mixing so every `(seed, stream, index)` triple gets its own generator.
fn mix(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed
        ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `{x : |x_i − c_i| ≤ r}`.
pub fn box_around(center: &[Rational], r: i64) -> HPolyhedron {
    let n = center.len();
    let mut rows = Vec::new();
    for (i, c) in center.iter().enumerate() {
        let e = crate::linalg::unit(n, i);
        rows.push((e.clone(), c + int(r)));
        rows.push((crate::linalg::neg(&e), -c + int(r)));
    }
    HPolyhedron::from_row_lists(n, rows, vec![])
}

pub struct Gen {
    rng: ChaCha8Rng,
    pub profile: Profile,
}

impl Gen {
    pub fn new(seed: u64, profile: Profile) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            profile,
        }
    }

    pub fn for_instance(seed: u64, stream: u64, index: u64, profile: Profile) -> Self {
        Self::new(mix(seed, stream, index), profile)
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    pub fn coef(&mut self) -> i64 {
        let b = self.profile.bound;
        self.int(-b, b)
    }

    /// Dimension in `1..=min(cap, profile.dims)`.
    pub fn dim(&mut self, cap: usize) -> usize {
        let top = cap.min(self.profile.dims).max(1);
        self.rng.random_range(1..=top)
    }

    /// Row count in `lo..=min(cap, profile.rows)`.
    pub fn rows(&mut self, lo: usize, cap: usize) -> usize {
        let top = cap.min(self.profile.rows).max(lo);
        self.rng.random_range(lo..=top)
    }

    pub fn vector(&mut self, n: usize) -> QVector {
        (0..n).map(|_| int(self.coef())).collect()
    }

    /// Entries in `[-2, 2]`, used for anchors and query points.
    pub fn small_vector(&mut self, n: usize) -> QVector {
        (0..n).map(|_| int(self.int(-2, 2))).collect()
    }

    pub fn nonzero_vector(&mut self, n: usize) -> QVector {
        loop {
            let v = self.vector(n);
            if !is_zero_vec(&v) {
                return v;
            }
        }
    }

    pub fn matrix(&mut self, m: usize, n: usize) -> QMatrix {
        let rows = (0..m).map(|_| self.vector(n)).collect();
        QMatrix::from_rows(n, rows).expect("rows of the declared width")
    }

    fn slack(&mut self, strict: bool) -> Rational {
        if !strict && self.chance(0.35) {
            int(0)
        } else {
            int(self.int(1, self.profile.bound.max(1)))
        }
    }

    /// `m` inequalities and `k` equalities holding at `anchor`. With `strict`
    /// every inequality has positive slack there.
    pub fn polyhedron_around(
        &mut self,
        anchor: &[Rational],
        m: usize,
        k: usize,
        strict: bool,
    ) -> HPolyhedron {
        let n = anchor.len();
        let mut rows = Vec::new();
        for _ in 0..m {
            let a = self.nonzero_vector(n);
            let b = dot(&a, anchor) + self.slack(strict);
            rows.push((a, b));
        }
        let mut eqs = Vec::new();
        for _ in 0..k {
            let a = self.nonzero_vector(n);
            let e = dot(&a, anchor);
            eqs.push((a, e));
        }
        HPolyhedron::from_row_lists(n, rows, eqs)
    }

    /// Usually full-dimensional; occasionally carries one equality.
    pub fn polyhedron(&mut self, n: usize) -> (HPolyhedron, QVector) {
        let anchor = self.small_vector(n);
        let m = self.rows(1, 2 * n + 2);
        let k = usize::from(n > 1 && self.chance(0.15));
        (self.polyhedron_around(&anchor, m, k, false), anchor)
    }

    /// Pieces whose max is attained by a random subset at `anchor`, on a
    /// domain around `anchor`.
    pub fn function_around(
        &mut self,
        anchor: &[Rational],
        strict_domain: bool,
    ) -> PolyhedralFunction {
        let n = anchor.len();
        let count = self.int(1, 3) as usize;
        let level = int(self.int(-2, 2));
        let mut pieces = Vec::new();
        for i in 0..count {
            let c = self.vector(n);
            let gap = if i == 0 || self.chance(0.5) {
                int(0)
            } else {
                int(self.int(1, 3))
            };
            let d = &level - dot(&c, anchor) - gap;
            pieces.push((c, d));
        }
        let domain = if self.chance(0.25) {
            HPolyhedron::universe(n)
        } else {
            let m = self.rows(1, n + 2);
            self.polyhedron_around(anchor, m, 0, strict_domain)
        };
        PolyhedralFunction::new(n, pieces, domain).expect("planted domain is nonempty")
    }

    /// A map whose graph contains `(x, y)`.
    pub fn map_around(&mut self, x: &[Rational], y: &[Rational]) -> PolyMap {
        let mut anchor = x.to_vec();
        anchor.extend_from_slice(y);
        let m = self.rows(1, anchor.len() + 2);
        let k = usize::from(self.chance(0.2));
        PolyMap::new(
            x.len(),
            y.len(),
            self.polyhedron_around(&anchor, m, k, false),
        )
        .expect("planted graph is nonempty")
    }

    /// `(f, g, A)` with `dom(g∘A)` meeting `ri(dom f)`, checked by LP after
    /// generation.
    pub fn qualified_fenchel(
        &mut self,
    ) -> Result<(PolyhedralFunction, PolyhedralFunction, QMatrix)> {
        loop {
            let n = self.dim(4);
            let m = self.dim(4);
            let a = self.matrix(m, n);
            let x = self.small_vector(n);
            let strict = self.chance(0.8);
            let mut f = self.function_around(&x, strict);
            if self.chance(0.7) {
                let r = self.int(1, 3);
                f = PolyhedralFunction::new(
                    n,
                    f.pieces().to_vec(),
                    f.domain().intersect(&box_around(&x, r))?,
                )?;
            }
            let y = if self.chance(0.8) {
                a.mul_vec(&x)
            } else {
                self.small_vector(m)
            };
            let g = self.function_around(&y, false);
            let composed = match g.compose_linear(&a) {
                Ok(c) => c,
                Err(Error::RangeMissesDomain) => continue,
                Err(e) => return Err(e),
            };
            if f.domain()
                .relative_interior_meets(composed.domain())?
                .is_some()
            {
                return Ok((f, g, a));
            }
        }
    }

    /// Random LP mixing feasible, infeasible and unbounded instances.
    pub fn lp(&mut self) -> LpProblem {
        let n = self.dim(6);
        let m = self.rows(0, 12);
        let planted = self.chance(0.7);
        let anchor = self.small_vector(n);
        let mut ineq = QMatrix::zeros(0, n);
        let mut rhs = Vec::new();
        for _ in 0..m {
            let a = self.vector(n);
            let b = if planted {
                dot(&a, &anchor) + self.slack(false)
            } else {
                int(self.coef())
            };
            ineq.push_row(a);
            rhs.push(b);
        }
        let k = if n > 1 && self.chance(0.3) {
            self.int(1, 2) as usize
        } else {
            0
        };
        let mut eq = QMatrix::zeros(0, n);
        let mut eq_rhs = Vec::new();
        for _ in 0..k {
            let a = self.vector(n);
            let e = if planted {
                dot(&a, &anchor)
            } else {
                int(self.coef())
            };
            eq.push_row(a);
            eq_rhs.push(e);
        }
        LpProblem::new(self.vector(n), ineq, rhs, eq, eq_rhs).expect("consistent LP shape")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let p = Profile::default();
        let a = Gen::for_instance(1, 2, 3, p).lp();
        let b = Gen::for_instance(1, 2, 3, p).lp();
        assert_eq!(a, b);
        assert_ne!(a, Gen::for_instance(1, 2, 4, p).lp());
    }

    #[test]
    fn planted_sets_contain_their_anchor() {
        let mut g = Gen::new(7, Profile::default());
        for _ in 0..50 {
            let n = g.dim(6);
            let (p, anchor) = g.polyhedron(n);
            assert!(p.contains_point(&anchor).unwrap());
            let strict = g.polyhedron_around(&anchor, 4, 0, true);
            assert!(strict.contains_point_ri(&anchor).unwrap());
            let f = g.function_around(&anchor, false);
            assert!(f.eval(&anchor).unwrap().is_finite());
        }
    }
}
