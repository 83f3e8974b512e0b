//! Least-squares weight system for component voting.
//!
//! Each windowed instance contributes a rank-one style update to an `m x m`
//! Gram matrix `A` and a vector `d`; the component weight vector is the
//! least-squares solution of `A w = d`. Because the per-instance pieces are
//! additive, the system is maintained incrementally: add the newest
//! instance, subtract the evicted one, and rebuild from scratch only when
//! the component set changes.

use crate::error::{Error, Result};
use crate::float::Float;
use crate::score::{IdealPoint, ScoreVector};
use crate::window::{CachedInstance, InstanceWindow};

/// Coefficient matrix `A`, remainder vector `d`, and solve machinery.
///
/// `A` is symmetric positive semi-definite by construction (a sum of
/// per-instance Gram matrices), so `A w = d` is always consistent and the
/// minimum-norm solution coincides with the minimum-norm least-squares
/// optimum of the underlying vote-versus-target objective.
#[derive(Debug, Clone)]
pub struct WeightSystem<F: Float> {
    m: usize,
    a: Vec<F>,
    d: Vec<F>,
}

/// Outcome of a weight solve.
#[derive(Debug, Clone)]
pub struct SolveReport<F: Float> {
    pub weights: Vec<F>,
    /// Numerical rank detected by the pivoted QR factorisation.
    pub rank: usize,
    /// True when the solve produced non-finite values and the uniform
    /// fallback `1/m` was substituted. Never silent: callers can log it.
    pub fallback_uniform: bool,
}

impl<F: Float> WeightSystem<F> {
    pub fn zeros(m: usize) -> Self {
        WeightSystem {
            m,
            a: vec![F::zero(); m * m],
            d: vec![F::zero(); m],
        }
    }

    pub fn component_count(&self) -> usize {
        self.m
    }

    pub fn a(&self) -> &[F] {
        &self.a
    }

    pub fn d(&self) -> &[F] {
        &self.d
    }

    pub fn entry(&self, q: usize, j: usize) -> F {
        self.a[q * self.m + j]
    }

    /// Build a system directly from an `m x m` matrix and length-`m` vector.
    pub fn from_parts(a: Vec<F>, d: Vec<F>) -> Result<Self> {
        let m = d.len();
        if a.len() != m * m {
            return Err(Error::Internal(format!(
                "matrix has {} entries, expected {}",
                a.len(),
                m * m
            )));
        }
        Ok(WeightSystem { m, a, d })
    }

    /// Add one instance's contribution: `scores[j]` is component `j`'s
    /// normalised vote, `ideal` the one-hot target.
    pub fn add_instance(&mut self, scores: &[&ScoreVector<F>], ideal: &IdealPoint) -> Result<()> {
        self.accumulate(scores, ideal, F::one())
    }

    /// Remove a previously added instance (window eviction down-date).
    pub fn sub_instance(&mut self, scores: &[&ScoreVector<F>], ideal: &IdealPoint) -> Result<()> {
        self.accumulate(scores, ideal, -F::one())
    }

    #[allow(clippy::needless_range_loop)]
    fn accumulate(
        &mut self,
        scores: &[&ScoreVector<F>],
        ideal: &IdealPoint,
        sign: F,
    ) -> Result<()> {
        if scores.len() != self.m {
            return Err(Error::Internal(format!(
                "{} score vectors for a {}-component system",
                scores.len(),
                self.m
            )));
        }
        let label = ideal.label();
        for q in 0..self.m {
            let sq = scores[q].scores();
            if sq.len() != ideal.classes() {
                return Err(Error::Internal("score/ideal dimension mismatch".into()));
            }
            for j in q..self.m {
                let sj = scores[j].scores();
                let mut dot = F::zero();
                for k in 0..sq.len() {
                    dot += sq[k] * sj[k];
                }
                self.a[q * self.m + j] += sign * dot;
                if j != q {
                    self.a[j * self.m + q] += sign * dot;
                }
            }
            self.d[q] += sign * sq[label];
        }
        Ok(())
    }

    /// Worst symmetry violation `max |A[q][j] - A[j][q]|`.
    pub fn symmetry_gap(&self) -> F {
        let mut gap = F::zero();
        for q in 0..self.m {
            for j in q + 1..self.m {
                let g = (self.entry(q, j) - self.entry(j, q)).abs();
                if g > gap {
                    gap = g;
                }
            }
        }
        gap
    }

    /// Least-squares solve of `A w = d`.
    ///
    /// Full rank: back-substitution on the pivoted QR factors. Rank
    /// deficient: the minimum-norm solution via a complete orthogonal
    /// decomposition. Non-finite output degrades to uniform weights with the
    /// report flagged.
    pub fn solve(&self) -> Result<SolveReport<F>> {
        if self.m == 0 {
            return Err(Error::NoComponents);
        }
        let (weights, rank) = solve_least_squares(&self.a, &self.d, self.m);
        if weights.iter().all(|w| w.is_finite()) {
            Ok(SolveReport {
                weights,
                rank,
                fallback_uniform: false,
            })
        } else {
            log::warn!(
                "weight solve produced non-finite values (rank {rank} of {}); \
                 falling back to uniform weights",
                self.m
            );
            let share = F::one() / F::of(self.m as f64);
            Ok(SolveReport {
                weights: vec![share; self.m],
                rank,
                fallback_uniform: true,
            })
        }
    }
}

/// Instance window plus the weight system maintained over it.
///
/// Pushes and evictions update `A` and `d` in place; any change to the
/// component set marks the accumulator dirty, and the next solve fills the
/// missing vote caches (scoring older instances with the newer model is the
/// only self-consistent option) and recomputes the system from scratch.
#[derive(Debug)]
pub struct WindowAccumulator<F: Float> {
    window: InstanceWindow<F>,
    system: WeightSystem<F>,
    dirty: bool,
}

impl<F: Float> WindowAccumulator<F> {
    pub fn new(capacity: usize) -> Self {
        WindowAccumulator {
            window: InstanceWindow::new(capacity),
            system: WeightSystem::zeros(0),
            dirty: false,
        }
    }

    pub fn window(&self) -> &InstanceWindow<F> {
        &self.window
    }

    pub fn system(&self) -> &WeightSystem<F> {
        &self.system
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty
    }

    /// Absorb a freshly scored instance. `ids` must list the live component
    /// ids in ensemble order; the slot's cache has to cover them all.
    pub fn push(&mut self, slot: CachedInstance<F>, ids: &[u64], p: usize) -> Result<()> {
        if !self.dirty {
            let scores = cached_votes(&slot, ids)?;
            let ideal = IdealPoint::new(slot.instance.label, p)?;
            self.system.add_instance(&scores, &ideal)?;
        }
        if let Some(evicted) = self.window.push(slot) {
            if !self.dirty {
                let scores = cached_votes(&evicted, ids)?;
                let ideal = IdealPoint::new(evicted.instance.label, p)?;
                self.system.sub_instance(&scores, &ideal)?;
            }
        }
        Ok(())
    }

    /// Note a component add/remove: purge dead caches, force a rebuild.
    pub fn mark_components_changed(&mut self, live_ids: &[u64]) {
        self.dirty = true;
        for slot in self.window.iter_mut() {
            slot.retain_scores(live_ids);
        }
    }

    /// Fill any missing caches via `score` and rebuild the system. No-op
    /// when the accumulator is clean.
    pub fn ensure<S>(&mut self, ids: &[u64], p: usize, score: S) -> Result<()>
    where
        S: Fn(u64, &crate::instance::Instance<F>) -> Result<ScoreVector<F>>,
    {
        if !self.dirty {
            return Ok(());
        }
        for slot in self.window.iter_mut() {
            for &id in ids {
                if slot.score_for(id).is_none() {
                    let vote = score(id, &slot.instance)?;
                    slot.insert_score(id, vote);
                }
            }
        }
        self.system = self.recompute(ids, p)?;
        self.dirty = false;
        Ok(())
    }

    /// From-scratch recomputation over the cached window votes.
    pub fn recompute(&self, ids: &[u64], p: usize) -> Result<WeightSystem<F>> {
        let mut sys = WeightSystem::zeros(ids.len());
        for slot in self.window.iter() {
            let scores = cached_votes(slot, ids)?;
            let ideal = IdealPoint::new(slot.instance.label, p)?;
            sys.add_instance(&scores, &ideal)?;
        }
        Ok(sys)
    }
}

fn cached_votes<'a, F: Float>(
    slot: &'a CachedInstance<F>,
    ids: &[u64],
) -> Result<Vec<&'a ScoreVector<F>>> {
    ids.iter()
        .map(|&id| {
            slot.score_for(id)
                .ok_or_else(|| Error::Internal(format!("missing cached vote for component {id}")))
        })
        .collect()
}

/// One instance's additive contribution `(A_i, d_i)`, exposed for tests and
/// cross-checks; the accumulator applies the same arithmetic in place.
pub fn instance_system<F: Float>(
    scores: &[&ScoreVector<F>],
    ideal: &IdealPoint,
) -> (Vec<F>, Vec<F>) {
    let m = scores.len();
    let mut a = vec![F::zero(); m * m];
    let mut d = vec![F::zero(); m];
    for q in 0..m {
        let sq = scores[q].scores();
        for j in 0..m {
            let sj = scores[j].scores();
            let mut dot = F::zero();
            for k in 0..sq.len() {
                dot += sq[k] * sj[k];
            }
            a[q * m + j] = dot;
        }
        d[q] = sq[ideal.label()];
    }
    (a, d)
}

/// Minimum-norm least-squares solution of the square system `a x = d`.
///
/// Column-pivoted Householder QR; rank decided against
/// `|R[0][0]| * m * machine-epsilon`. Returns the solution and the rank.
#[allow(clippy::needless_range_loop)]
fn solve_least_squares<F: Float>(a: &[F], d: &[F], m: usize) -> (Vec<F>, usize) {
    let mut r = a.to_vec();
    let mut c = d.to_vec();
    let mut perm: Vec<usize> = (0..m).collect();

    for k in 0..m {
        // Pivot on the largest trailing column norm, recomputed exactly.
        let mut best = k;
        let mut best_norm = F::zero();
        for j in k..m {
            let mut s = F::zero();
            for i in k..m {
                let v = r[i * m + j];
                s += v * v;
            }
            if s > best_norm {
                best_norm = s;
                best = j;
            }
        }
        if best != k {
            for i in 0..m {
                r.swap(i * m + k, i * m + best);
            }
            perm.swap(k, best);
        }
        let norm = best_norm.sqrt();
        if norm == F::zero() {
            continue;
        }

        let x0 = r[k * m + k];
        let alpha = if x0 >= F::zero() { -norm } else { norm };
        let mut v = vec![F::zero(); m - k];
        v[0] = x0 - alpha;
        for i in k + 1..m {
            v[i - k] = r[i * m + k];
        }
        let vnorm = v.iter().map(|&t| t * t).sum::<F>().sqrt();
        for t in v.iter_mut() {
            *t /= vnorm;
        }
        for j in k + 1..m {
            let mut dot = F::zero();
            for i in k..m {
                dot += v[i - k] * r[i * m + j];
            }
            let twice = dot + dot;
            for i in k..m {
                r[i * m + j] -= twice * v[i - k];
            }
        }
        let mut dot = F::zero();
        for i in k..m {
            dot += v[i - k] * c[i];
        }
        let twice = dot + dot;
        for i in k..m {
            c[i] -= twice * v[i - k];
        }
        r[k * m + k] = alpha;
        for i in k + 1..m {
            r[i * m + k] = F::zero();
        }
    }

    let tol = r[0].abs() * F::of(m as f64) * F::epsilon();
    let mut rank = 0;
    while rank < m && r[rank * m + rank].abs() > tol {
        rank += 1;
    }

    let y = if rank == m {
        let mut y = vec![F::zero(); m];
        for i in (0..m).rev() {
            let mut acc = c[i];
            for j in i + 1..m {
                acc -= r[i * m + j] * y[j];
            }
            y[i] = acc / r[i * m + i];
        }
        y
    } else {
        min_norm_underdetermined(&r, &c, m, rank)
    };

    let mut x = vec![F::zero(); m];
    for (pos, &orig) in perm.iter().enumerate() {
        x[orig] = y[pos];
    }
    (x, rank)
}

/// Minimum-norm `y` with `R1 y = c1`, where `R1` is the leading `rank` rows
/// of the upper-trapezoidal factor. Second (unpivoted) QR on `R1^T`.
fn min_norm_underdetermined<F: Float>(r: &[F], c: &[F], m: usize, rank: usize) -> Vec<F> {
    if rank == 0 {
        return vec![F::zero(); m];
    }
    // b = R1^T, an m x rank matrix.
    let mut b = vec![F::zero(); m * rank];
    for i in 0..rank {
        for j in 0..m {
            b[j * rank + i] = r[i * m + j];
        }
    }
    let mut reflectors: Vec<Vec<F>> = Vec::with_capacity(rank);
    for k in 0..rank {
        let mut norm_sq = F::zero();
        for i in k..m {
            let v = b[i * rank + k];
            norm_sq += v * v;
        }
        let norm = norm_sq.sqrt();
        if norm == F::zero() {
            reflectors.push(Vec::new());
            continue;
        }
        let x0 = b[k * rank + k];
        let alpha = if x0 >= F::zero() { -norm } else { norm };
        let mut v = vec![F::zero(); m - k];
        v[0] = x0 - alpha;
        for i in k + 1..m {
            v[i - k] = b[i * rank + k];
        }
        let vnorm = v.iter().map(|&t| t * t).sum::<F>().sqrt();
        for t in v.iter_mut() {
            *t /= vnorm;
        }
        for j in k..rank {
            let mut dot = F::zero();
            for i in k..m {
                dot += v[i - k] * b[i * rank + j];
            }
            let twice = dot + dot;
            for i in k..m {
                b[i * rank + j] -= twice * v[i - k];
            }
        }
        reflectors.push(v);
    }
    // Forward solve T^T z = c1 with T the upper rank x rank block of b.
    let mut z = vec![F::zero(); rank];
    for i in 0..rank {
        let mut acc = c[i];
        for j in 0..i {
            acc -= b[j * rank + i] * z[j];
        }
        z[i] = acc / b[i * rank + i];
    }
    // y = Q2 z: apply stored reflectors in reverse to [z; 0].
    let mut y = vec![F::zero(); m];
    y[..rank].copy_from_slice(&z);
    for k in (0..rank).rev() {
        let v = &reflectors[k];
        if v.is_empty() {
            continue;
        }
        let mut dot = F::zero();
        for i in k..m {
            dot += v[i - k] * y[i];
        }
        let twice = dot + dot;
        for i in k..m {
            y[i] -= twice * v[i - k];
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sv(raw: &[f64]) -> ScoreVector<f64> {
        ScoreVector::normalized(raw, raw.len()).unwrap()
    }

    #[test]
    fn instance_system_single_component() {
        let s = sv(&[0.6, 0.4]);
        let o = IdealPoint::new(0, 2).unwrap();
        let (a, d) = instance_system(&[&s], &o);
        assert!((a[0] - 0.52).abs() < 1e-12);
        assert!((d[0] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn instance_system_perfect_component() {
        let s = ScoreVector::<f64>::one_hot(1, 3);
        let o = IdealPoint::new(1, 3).unwrap();
        let (a, d) = instance_system(&[&s], &o);
        assert_eq!(a, vec![1.0]);
        assert_eq!(d, vec![1.0]);
    }

    #[test]
    fn instance_system_identical_components_symmetric() {
        let s1 = sv(&[0.3, 0.7]);
        let s2 = sv(&[0.3, 0.7]);
        let o = IdealPoint::new(1, 2).unwrap();
        let (a, _) = instance_system(&[&s1, &s2], &o);
        assert_eq!(a[0], a[1]);
        assert_eq!(a[0], a[2]);
        assert_eq!(a[0], a[3]);
    }

    #[test]
    fn identity_system_returns_rhs() {
        let sys = WeightSystem::<f64>::from_parts(
            vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
            vec![0.4, -0.2, 1.5],
        )
        .unwrap();
        let rep = sys.solve().unwrap();
        assert_eq!(rep.rank, 3);
        assert!(!rep.fallback_uniform);
        for (w, e) in rep.weights.iter().zip([0.4, -0.2, 1.5]) {
            assert!((w - e).abs() < 1e-12);
        }
    }

    #[test]
    fn worked_two_component_system() {
        let sys = WeightSystem::<f64>::from_parts(vec![1.37, 1.11, 1.11, 1.05], vec![1.61, 1.18])
            .unwrap();
        let rep = sys.solve().unwrap();
        // Exact solve of the rounded display values.
        assert!((rep.weights[0] - 1.8445).abs() < 1e-3, "{:?}", rep.weights);
        assert!((rep.weights[1] + 0.8261).abs() < 1e-3, "{:?}", rep.weights);
    }

    #[test]
    fn duplicate_components_get_min_norm_split() {
        // Two identical components: A = [[a,a],[a,a]], d = [b,b].
        // Any w1 + w2 = b/a solves; minimum norm splits evenly.
        let a = 0.58;
        let b = 0.6;
        let sys = WeightSystem::<f64>::from_parts(vec![a, a, a, a], vec![b, b]).unwrap();
        let rep = sys.solve().unwrap();
        assert_eq!(rep.rank, 1);
        let expect = b / (2.0 * a);
        assert!((rep.weights[0] - expect).abs() < 1e-12);
        assert!((rep.weights[1] - expect).abs() < 1e-12);
    }

    #[test]
    fn zero_system_solves_to_zero() {
        let sys = WeightSystem::<f64>::zeros(3);
        let rep = sys.solve().unwrap();
        assert_eq!(rep.rank, 0);
        assert_eq!(rep.weights, vec![0.0; 3]);
    }

    #[test]
    fn empty_system_is_an_error() {
        let sys = WeightSystem::<f64>::zeros(0);
        assert!(matches!(sys.solve(), Err(Error::NoComponents)));
    }

    #[test]
    fn add_then_sub_restores_zero() {
        let mut sys = WeightSystem::zeros(2);
        let s1 = sv(&[0.9, 0.1]);
        let s2 = sv(&[0.2, 0.8]);
        let o = IdealPoint::new(0, 2).unwrap();
        sys.add_instance(&[&s1, &s2], &o).unwrap();
        sys.sub_instance(&[&s1, &s2], &o).unwrap();
        assert!(sys.a().iter().all(|&v| v.abs() < 1e-15));
        assert!(sys.d().iter().all(|&v| v.abs() < 1e-15));
    }

    #[test]
    fn accumulate_rejects_wrong_arity() {
        let mut sys = WeightSystem::zeros(2);
        let s = sv(&[0.5, 0.5]);
        let o = IdealPoint::new(0, 2).unwrap();
        assert!(matches!(
            sys.add_instance(&[&s], &o),
            Err(Error::Internal(_))
        ));
    }

    proptest! {
        /// Random accumulated systems stay symmetric and solve with a
        /// near-zero gradient of the quadratic objective (A w - d ~ 0).
        #[test]
        fn random_systems_solve_consistently(
            seed_rows in prop::collection::vec(
                prop::collection::vec(0.01f64..1.0, 3),
                4..30,
            ),
            labels in prop::collection::vec(0usize..3, 30),
        ) {
            let m = 3;
            let p = 3;
            let mut sys = WeightSystem::zeros(m);
            for (i, row) in seed_rows.iter().enumerate() {
                let votes: Vec<ScoreVector<f64>> = (0..m)
                    .map(|j| {
                        let raw: Vec<f64> =
                            (0..p).map(|k| row[(j + k) % 3] + 0.1 * (k as f64)).collect();
                        sv(&raw)
                    })
                    .collect();
                let refs: Vec<&ScoreVector<f64>> = votes.iter().collect();
                let o = IdealPoint::new(labels[i % labels.len()], p).unwrap();
                sys.add_instance(&refs, &o).unwrap();
            }
            prop_assert!(sys.symmetry_gap() < 1e-9);
            let rep = sys.solve().unwrap();
            // residual of the normal system
            let dn = sys.d().iter().map(|v| v * v).sum::<f64>().sqrt();
            for q in 0..m {
                let mut g = -sys.d()[q];
                for j in 0..m {
                    g += sys.entry(q, j) * rep.weights[j];
                }
                prop_assert!(g.abs() <= 1e-6 * (1.0 + dn), "gradient {g}");
            }
        }
    }
}
