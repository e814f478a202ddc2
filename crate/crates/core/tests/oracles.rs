use bvm_core::numeration::FgSequences;
use bvm_core::prob::ratio;
use bvm_core::process::{bound_coefficients, return_time_bound};
use bvm_core::spectrum::{uw_step, Coord, SpectralParams};
use bvm_core::{
    process, AddingMachine, BigUint, BratteliDiagram, FgNumeration, IncidenceMatrix, ProbSchedule,
    TailRule, VershikSystem,
};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

fn stationary(m: [[u32; 2]; 2]) -> VershikSystem {
    let d = BratteliDiagram::build_stationary(2, IncidenceMatrix::new(&m).unwrap(), None).unwrap();
    VershikSystem::new(d).unwrap()
}

/// All paths from level 0 into vertex `v` of level `k`, in Vershik order (top edge
/// varying slowest), as `(s, m, r)` triples for levels `1..=k`.
fn paths_into(m: &[[u32; 2]; 2], k: usize, v: u32) -> Vec<Vec<(u32, u64, u32)>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut order = 0u64;
    for s in 1..=2u32 {
        for _ in 0..m[(v - 1) as usize][(s - 1) as usize] {
            for mut lower in paths_into(m, k - 1, s) {
                lower.push((s, order, v));
                out.push(lower);
            }
            order += 1;
        }
    }
    out
}

fn strip_minimal(mut p: Vec<(u32, u64, u32)>) -> Vec<(u32, u64, u32)> {
    while p.last() == Some(&(1, 0, 1)) {
        p.pop();
    }
    p
}

#[test]
fn successor_matches_path_enumeration() {
    for m in [[[2, 1], [3, 1]], [[1, 3], [1, 4]], [[1, 1], [1, 0]]] {
        let sys = stationary(m);
        let all = paths_into(&m, 5, 1);
        let mut x = sys.x0();
        for (n, p) in all.into_iter().enumerate() {
            assert_eq!(x.triples(), strip_minimal(p), "{:?} at {}", m, n);
            x = sys.successor(&x);
        }
    }
}

#[test]
fn fg_counts_agree_with_enumeration() {
    for m in [[[2, 1], [3, 1]], [[1, 3], [1, 4]], [[1, 1], [1, 0]]] {
        let fg = FgSequences::stationary([m[0][0], m[0][1], m[1][0], m[1][1]], 6);
        for k in 0..=6 {
            assert_eq!(fg.f[k], BigUint::from(paths_into(&m, k, 1).len()));
            assert_eq!(fg.g[k], BigUint::from(paths_into(&m, k, 2).len()));
        }
    }
}

#[test]
fn reference_sequences() {
    let fg = FgSequences::stationary([2, 1, 3, 1], 3);
    let f: Vec<u32> = fg.f.iter().map(|v| v.to_u32().unwrap()).collect();
    let g: Vec<u32> = fg.g.iter().map(|v| v.to_u32().unwrap()).collect();
    assert_eq!(f, [1, 3, 10, 33]);
    assert_eq!(g, [1, 4, 13, 43]);
}

#[test]
fn small_encodings() {
    let sys = stationary([[1, 3], [1, 4]]);
    let num = FgNumeration::new(sys.diagram()).unwrap();
    assert_eq!(num.encode_u64(4).pairs(), [(0, 0), (1, 0)]);
    let sys = stationary([[2, 1], [3, 1]]);
    let num = FgNumeration::new(sys.diagram()).unwrap();
    let ds = num.encode_u64(85);
    assert_eq!(ds.pairs(), [(3, 0), (2, 0), (1, 0), (2, 0)]);
    assert_eq!(3 + 2 * 3 + 10 + 2 * 33, 85);
    assert_eq!(num.path_digits(&sys.iterate(&sys.x0(), 85)), ds);
}

#[test]
fn simplicity_witnesses() {
    let d = BratteliDiagram::build_stationary(
        2,
        IncidenceMatrix::new(&[[2, 1], [3, 1]]).unwrap(),
        None,
    )
    .unwrap();
    assert_eq!(d.check_simplicity(3).witness(), Some((0, 1)));
    let d = BratteliDiagram::build_stationary(
        2,
        IncidenceMatrix::new(&[[1, 1], [1, 0]]).unwrap(),
        None,
    )
    .unwrap();
    assert_eq!(d.check_simplicity(3).witness(), Some((0, 2)));
}

#[test]
fn row_85_by_hand() {
    let sys = stationary([[2, 1], [3, 1]]);
    let ps = ProbSchedule::explicit(
        vec![ratio(3, 10), ratio(1, 2), ratio(7, 10)],
        TailRule::Cycle,
    )
    .unwrap();
    let machine = AddingMachine::new(sys, ps);
    let row = machine
        .operator_row::<BigRational>(&BigUint::from(85u32))
        .unwrap();
    let (p1, p2, p3) = (ratio(3, 10), ratio(1, 2), ratio(7, 10));
    let one = BigRational::one();
    let expected = [
        (76u32, &p1 * &p2 * (&one - &p3)),
        (82, &p1 * (&one - &p2)),
        (85, &one - &p1),
        (86, &p1 * &p2 * &p3),
    ];
    let got: Vec<(u32, BigRational)> = row
        .into_vec()
        .into_iter()
        .map(|(k, v)| (k.to_u32().unwrap(), v))
        .collect();
    let expected: Vec<(u32, BigRational)> = expected.into_iter().collect();
    assert_eq!(got, expected);
}

#[test]
fn return_time_series() {
    let ps = ProbSchedule::geometric(ratio(1, 4)).unwrap();
    let c = bound_coefficients(1, 8);
    assert_eq!(c, [2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0]);
    let c2 = bound_coefficients(2, 6);
    assert_eq!(c2, [3.0, 5.0, 9.0, 10.0, 18.0, 20.0]);

    let mut long = 2.0;
    let mut cj = vec![0.0, 2.0, 3.0, 4.0];
    for j in 4..=400 {
        cj.push(2.0 * cj[j - 2]);
    }
    for (j, c) in cj.iter().enumerate().skip(1) {
        let prev = if j == 1 {
            1.0
        } else {
            0.25f64.powi(j as i32 - 1)
        };
        long += c * prev.max(0.25f64.powi(j as i32));
    }
    let b = return_time_bound(1, &ps, 20);
    assert!(b.remainder.unwrap() < 1e-3);
    assert!(b.partial <= long && long <= b.bound);
    assert!((b.bound - 5.143).abs() < 5e-3);

    let ps = ProbSchedule::geometric(ratio(1, 8)).unwrap();
    assert!(return_time_bound(2, &ps, 20).is_finite());
    let ps = ProbSchedule::constant(ratio(1, 2)).unwrap();
    assert!(!return_time_bound(1, &ps, 20).is_finite());
}

#[test]
fn one_step_frequencies_from_x0() {
    let sys = stationary([[2, 1], [3, 1]]);
    let machine = AddingMachine::new(sys, ProbSchedule::constant(ratio(1, 2)).unwrap());
    let x0 = machine.system().x0();
    let mut rng = process::replica_rng(7, 0);
    let n = 100_000u64;
    let stays = (0..n).filter(|_| machine.step(&x0, &mut rng) == x0).count() as f64;
    let sigma = (n as f64 * 0.25).sqrt();
    assert!((stays - 0.5 * n as f64).abs() <= 3.0 * sigma);
}

#[test]
fn quadratic_step_values() {
    let p = SpectralParams::stationary([1, 1, 1, 1], ProbSchedule::constant(ratio(1, 2)).unwrap())
        .unwrap();
    for (z, expected) in [
        (1.0, 1.0),
        (3.0, 17.0),
        (-1.0, 1.0),
        (0.5, -0.5),
        (2.0, 7.0),
    ] {
        let c = Coord::Value(Complex64::new(z, 0.0));
        let (u, w) = uw_step(c, c, 1, &p);
        let direct = (z * z - 0.5) / 0.5;
        assert_eq!(direct, expected);
        assert_eq!(u, Coord::Value(Complex64::new(expected, 0.0)));
        assert_eq!(u, w);
    }
}
