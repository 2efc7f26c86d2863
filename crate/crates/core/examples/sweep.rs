//! Error probability over a grid of `n` and the fitted exponent, for the
//! block protocol and simple forwarding at BSC(0.3) on both hops.

use twohop::channel::ChannelDescriptor;
use twohop::exponent::binary_kl;
use twohop::harness::{DecoderKind, Experiment, ExperimentConfig};
use twohop::protocol::{ProtocolKind, ProtocolSpec};

fn main() -> twohop::Result<()> {
    let bsc = ChannelDescriptor::Bsc { p: 0.3 };
    println!("D(1/2||0.3) = {:.4}", binary_kl(0.5, 0.3)?);
    for (kind, decoder) in [
        (ProtocolKind::BscBlock, DecoderKind::BlockMl),
        (ProtocolKind::SimpleForwarding, DecoderKind::Majority { epsilon: 1.0 }),
    ] {
        let config = ExperimentConfig {
            protocol: ProtocolSpec::new(kind, 10, bsc.clone(), bsc.clone()),
            decoder,
            n_grid: vec![20, 40, 60, 80, 100],
            trials: 40_000,
            seed: 1,
            min_errors: 50,
        };
        let result = Experiment::new(config)?.sweep()?;
        println!("{}", kind.name());
        for p in &result.points {
            println!("  n = {:3}  errors = {:5}  p_hat = {:.3e}", p.n, p.errors, p.p_hat);
        }
        match (&result.fit, &result.fit_error) {
            (Some(f), _) => println!("  slope {:.4} +- {:.4}", f.slope, f.slope_se),
            (None, Some(e)) => println!("  no fit: {e}"),
            _ => {}
        }
    }
    Ok(())
}
