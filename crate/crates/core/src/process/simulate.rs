use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::AddingMachine;
use crate::vershik::PathState;

/// The generator for replica `replica` of a run seeded with `seed`.
///
/// Every replica uses its own ChaCha stream, so replicas can run in any order or
/// in parallel and still reproduce bit for bit.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// Summary of one simulated run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    pub start: PathState,
    pub steps: u64,
    pub final_state: PathState,
    /// Occupation counts at times `1..=steps`.
    pub visits: BTreeMap<PathState, u64>,
    /// Lengths of the completed excursions away from `x₀`: successive differences
    /// of the visit times to `x₀`, the first measured from time 0.
    pub return_times: Vec<u64>,
}

fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    p >= 1.0 || rng.random::<f64>() < p
}

impl AddingMachine {
    /// One random step from `x`.
    ///
    /// Carries are attempted level by level through `A(x)` and then at `ζ(x)`; the
    /// first failure decides the target. This realizes exactly the one-step law of
    /// [`AddingMachine::transition_distribution`].
    pub fn step<R: Rng + ?Sized>(&self, x: &PathState, rng: &mut R) -> PathState {
        let sys = self.system();
        let zeta = sys.zeta(x);
        let carries = sys.carry_set_with_zeta(x, zeta);
        let mut last = None;
        for &k in &carries {
            if !bernoulli(rng, self.schedule().p_f64(k)) {
                return match last {
                    None => x.clone(),
                    Some(j) => sys.reset_at_level(x, j),
                };
            }
            last = Some(k);
        }
        if bernoulli(rng, self.schedule().p_f64(zeta)) {
            sys.successor_with_zeta(x, zeta)
        } else {
            match last {
                None => x.clone(),
                Some(j) => sys.reset_at_level(x, j),
            }
        }
    }

    /// Runs `steps` transitions from `start`.
    pub fn simulate<R: Rng + ?Sized>(
        &self,
        start: &PathState,
        steps: u64,
        rng: &mut R,
    ) -> Trajectory {
        let mut visits = BTreeMap::new();
        let mut return_times = Vec::new();
        let mut last_visit = 0u64;
        let mut cur = start.clone();
        for t in 1..=steps {
            cur = self.step(&cur, rng);
            if cur.is_empty() {
                return_times.push(t - last_visit);
                last_visit = t;
            }
            *visits.entry(cur.clone()).or_insert(0) += 1;
        }
        Trajectory {
            start: start.clone(),
            steps,
            final_state: cur,
            visits,
            return_times,
        }
    }

    /// First time `n ≥ 1` at which a run from `x₀` is back at `x₀`, if it happens
    /// within `max_steps`.
    pub fn first_return<R: Rng + ?Sized>(&self, max_steps: u64, rng: &mut R) -> Option<u64> {
        let mut cur = PathState::default();
        for t in 1..=max_steps {
            cur = self.step(&cur, rng);
            if cur.is_empty() {
                return Some(t);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{BratteliDiagram, IncidenceMatrix};
    use crate::prob::ratio;
    use crate::process::ProbSchedule;
    use crate::vershik::VershikSystem;

    fn machine(p: ProbSchedule) -> AddingMachine {
        let d = BratteliDiagram::build_stationary(
            2,
            IncidenceMatrix::new(&[[2, 1], [3, 1]]).unwrap(),
            None,
        )
        .unwrap();
        AddingMachine::new(VershikSystem::new(d).unwrap(), p)
    }

    #[test]
    fn zero_steps() {
        let m = machine(ProbSchedule::constant(ratio(1, 2)).unwrap());
        let start = m.system().iterate(&m.system().x0(), 7);
        let t = m.simulate(&start, 0, &mut replica_rng(1, 0));
        assert!(t.visits.is_empty());
        assert!(t.return_times.is_empty());
        assert_eq!(t.final_state, start);
    }

    #[test]
    fn certain_carries_follow_the_orbit() {
        let m = machine(ProbSchedule::constant(ratio(1, 1)).unwrap());
        let start = m.system().iterate(&m.system().x0(), 11);
        let t = m.simulate(&start, 200, &mut replica_rng(9, 3));
        assert_eq!(t.final_state, m.system().iterate(&start, 200));
        assert!(t.visits.values().all(|&c| c == 1));
    }

    #[test]
    fn replicas_are_reproducible_and_distinct() {
        let m = machine(ProbSchedule::constant(ratio(1, 2)).unwrap());
        let x0 = m.system().x0();
        let a = m.simulate(&x0, 500, &mut replica_rng(42, 0));
        let b = m.simulate(&x0, 500, &mut replica_rng(42, 0));
        let c = m.simulate(&x0, 500, &mut replica_rng(42, 1));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn one_step_frequencies_from_x0() {
        let m = machine(ProbSchedule::constant(ratio(1, 2)).unwrap());
        let x0 = m.system().x0();
        let mut rng = replica_rng(7, 0);
        let n = 100_000u32;
        let stays = (0..n).filter(|_| m.step(&x0, &mut rng).is_empty()).count() as f64;
        let sigma = (f64::from(n) * 0.25).sqrt();
        assert!((stays - f64::from(n) / 2.0).abs() < 3.0 * sigma);
    }
}
