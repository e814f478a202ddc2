//! Data-parallel drivers. Work is split by row or replica and reassembled in
//! index order, so output never depends on the thread count.

use bvm_core::process::{replica_rng, Trajectory, Triplet};
use bvm_core::spectrum::{render_row, GridSpec, Raster, SetKind, SpectralParams};
use bvm_core::{AddingMachine, PathState, Probability};
use rayon::prelude::*;

/// Environment variable capping the worker count.
pub const THREADS_VAR: &str = "BVM_THREADS";

fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs `f` on a pool sized by `BVM_THREADS` (all cores when unset).
pub fn install<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    match builder.build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

pub fn render(grid: &GridSpec, params: &SpectralParams, set: SetKind) -> Raster {
    let rows: Vec<Vec<u32>> = install(|| {
        (0..grid.height)
            .into_par_iter()
            .map(|y| render_row(grid, y, params, set))
            .collect()
    });
    Raster {
        width: grid.width,
        height: grid.height,
        data: rows.concat(),
    }
}

/// Rows `0..size` of the transition operator, row-major.
pub fn operator<P: Probability + Send>(machine: &AddingMachine, size: u64) -> Vec<Triplet<P>> {
    let rows: Vec<Vec<Triplet<P>>> = install(|| {
        (0..size)
            .into_par_iter()
            .map(|n| {
                let mut out = Vec::new();
                machine.push_row_triplets::<P>(n, &mut out);
                out
            })
            .collect()
    });
    rows.concat()
}

/// `replicas` independent runs of `steps` transitions from `start`; replica `i`
/// draws from stream `i` of `seed`.
pub fn simulate(
    machine: &AddingMachine,
    start: &PathState,
    steps: u64,
    seed: u64,
    replicas: u64,
) -> Vec<Trajectory> {
    install(|| {
        (0..replicas)
            .into_par_iter()
            .map(|i| machine.simulate(start, steps, &mut replica_rng(seed, i)))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use bvm_core::prob::ratio;
    use bvm_core::spectrum::render_set;
    use bvm_core::{BratteliDiagram, IncidenceMatrix, ProbSchedule, VershikSystem};

    fn machine() -> AddingMachine {
        let d = BratteliDiagram::build_stationary(
            2,
            IncidenceMatrix::new(&[[2, 1], [3, 1]]).unwrap(),
            None,
        )
        .unwrap();
        AddingMachine::new(
            VershikSystem::new(d).unwrap(),
            ProbSchedule::constant(ratio(1, 2)).unwrap(),
        )
    }

    #[test]
    fn render_matches_serial() {
        let params =
            SpectralParams::stationary([1, 1, 1, 1], ProbSchedule::constant(ratio(4, 5)).unwrap())
                .unwrap();
        let grid = GridSpec::new((-2.0, 2.0), (-1.0, 1.0), 17, 9).unwrap();
        assert_eq!(
            render(&grid, &params, SetKind::F),
            render_set(&grid, &params, SetKind::F)
        );
    }

    #[test]
    fn operator_matches_serial() {
        let m = machine();
        assert_eq!(operator::<f64>(&m, 50), m.build_operator::<f64>(50));
    }

    #[test]
    fn replicas_are_independent_of_order() {
        let m = machine();
        let x0 = m.system().x0();
        let all = simulate(&m, &x0, 200, 11, 4);
        for (i, t) in all.iter().enumerate() {
            assert_eq!(*t, m.simulate(&x0, 200, &mut replica_rng(11, i as u64)));
        }
        assert_ne!(all[0], all[1]);
    }
}
