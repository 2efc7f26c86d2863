//! Statistical checks of the simulator against analytic quantities.

use twohop::channel::{make_bsc, ChannelDescriptor};
use twohop::exponent::{binary_kl, sgb_lower_bound};
use twohop::harness::{analytic_block_bound, DecoderKind, ErrorEstimate, Experiment, ExperimentConfig, SweepResult};
use twohop::protocol::{ProtocolKind, ProtocolSpec};

const MAJORITY: DecoderKind = DecoderKind::Majority { epsilon: 1.0 };

fn bsc(p: f64) -> ChannelDescriptor {
    ChannelDescriptor::Bsc { p }
}

fn experiment(kind: ProtocolKind, k: usize, p: f64, q: f64, n_grid: Vec<usize>, trials: u64, seed: u64) -> Experiment {
    let decoder = if kind.is_block() { DecoderKind::BlockMl } else { MAJORITY };
    Experiment::new(ExperimentConfig {
        protocol: ProtocolSpec::new(kind, k, bsc(p), bsc(q)),
        decoder,
        n_grid,
        trials,
        seed,
        min_errors: 50,
    })
    .unwrap()
}

fn sweep(kind: ProtocolKind, k: usize, p: f64, n_grid: Vec<usize>, trials: u64) -> SweepResult {
    experiment(kind, k, p, p, n_grid, trials, 17).sweep().unwrap()
}

#[test]
fn near_noiseless_channels_never_err() {
    for kind in [ProtocolKind::BscBlock, ProtocolKind::SimpleForwarding, ProtocolKind::Cumulative] {
        let e = experiment(kind, 8, 1e-9, 1e-9, vec![64], 10_000, 1);
        assert_eq!(e.run_point(64).unwrap().errors, 0, "{kind:?}");
    }
}

/// Two-proportion z statistic.
fn z_stat(a: &ErrorEstimate, b: &ErrorEstimate) -> f64 {
    let pooled = (a.errors + b.errors) as f64 / (a.trials + b.trials) as f64;
    let se = (pooled * (1.0 - pooled) * (1.0 / a.trials as f64 + 1.0 / b.trials as f64)).sqrt();
    (a.p_hat - b.p_hat) / se
}

#[test]
fn unequal_hops_match_the_degraded_symmetric_pair() {
    let n = 60;
    let direct = experiment(ProtocolKind::BscBlock, 10, 0.3, 0.3, vec![n], 40_000, 2).run_point(n).unwrap();
    for (p, q) in [(0.1, 0.3), (0.3, 0.1)] {
        let reduced = experiment(ProtocolKind::BscBlock, 10, p, q, vec![n], 40_000, 3).run_point(n).unwrap();
        let z = z_stat(&reduced, &direct);
        assert!(z.abs() < 3.3, "p = {p}, q = {q}: {} vs {} (z = {z})", reduced.p_hat, direct.p_hat);
    }
    // without degradation the cleaner hop would make a visible difference
    let cleaner = experiment(ProtocolKind::BscBlock, 10, 0.1, 0.1, vec![n], 40_000, 4).run_point(n).unwrap();
    assert!(z_stat(&cleaner, &direct) < -3.3);
}

#[test]
fn one_hop_reduction_respects_the_finite_n_floor() {
    let p = 0.3;
    let ch = make_bsc(p).unwrap();
    for kind in [ProtocolKind::SimpleForwarding, ProtocolKind::Cumulative] {
        let grid = vec![10, 30, 60, 100];
        let e = experiment(kind, 1, p, 1e-9, grid.clone(), 20_000, 5);
        for n in grid {
            let est = e.run_point(n).unwrap();
            let floor = sgb_lower_bound(&ch, n as u64).unwrap();
            assert!(est.ci99.1 >= floor, "{kind:?}, n = {n}: {} below {floor}", est.p_hat);
        }
    }
}

#[test]
fn forwarding_slope_stays_below_the_one_hop_exponent() {
    let p = 0.3;
    let r = sweep(ProtocolKind::SimpleForwarding, 1, p, vec![40, 80, 120, 160, 200], 20_000);
    let fit = r.fit.expect("enough errors for a fit");
    let limit = binary_kl(0.5, p).unwrap();
    assert!(fit.slope > 0.0);
    assert!(fit.slope + 3.0 * fit.slope_se < limit, "slope {} vs {limit}", fit.slope);
}

#[test]
fn block_protocol_beats_forwarding_at_k40() {
    let p = 0.3;
    let grid = vec![80, 120, 160];
    let block = sweep(ProtocolKind::BscBlock, 40, p, grid.clone(), 800_000).fit.expect("block fit");
    let forward = sweep(ProtocolKind::SimpleForwarding, 40, p, grid, 50_000).fit.expect("forwarding fit");
    let d = binary_kl(0.5, p).unwrap();
    assert!(block.slope >= 0.6 * d, "block slope {} vs {}", block.slope, 0.6 * d);
    let z = (block.slope - forward.slope) / (block.slope_se.powi(2) + forward.slope_se.powi(2)).sqrt();
    assert!(z > 2.33, "block {} vs forwarding {}", block.slope, forward.slope);
}

#[test]
fn empirical_error_stays_under_the_analytic_bound() {
    for (p, k, grid) in [(0.3, 8, vec![16, 32, 48]), (0.2, 8, vec![16, 32, 48]), (0.25, 30, vec![600])] {
        let e = experiment(ProtocolKind::BscBlock, k, p, p, grid.clone(), 10_000, 6);
        for n in grid {
            let est = e.run_point(n).unwrap();
            let bound = analytic_block_bound(e.protocol(), n).unwrap();
            assert!(est.ci99.0 <= bound, "p = {p}, k = {k}, n = {n}: {} vs {bound}", est.p_hat);
        }
    }
}

#[test]
fn repeated_runs_are_identical() {
    let make = || experiment(ProtocolKind::BscBlock, 8, 0.25, 0.2, vec![24, 48], 3_000, 21);
    assert_eq!(make().sweep().unwrap(), make().sweep().unwrap());
}
