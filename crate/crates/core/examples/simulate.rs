//! One Monte Carlo point for the block protocol and the two forwarding
//! baselines at the same `n`, written as CSV.

use twohop::channel::ChannelDescriptor;
use twohop::harness::{write_csv, DecoderKind, Experiment, ExperimentConfig};
use twohop::protocol::{ProtocolKind, ProtocolSpec};

fn main() -> twohop::Result<()> {
    let (k, n) = (10, 100);
    let bsc = ChannelDescriptor::Bsc { p: 0.3 };
    let runs = [
        (ProtocolKind::BscBlock, DecoderKind::BlockMl),
        (ProtocolKind::SimpleForwarding, DecoderKind::Majority { epsilon: 1.0 }),
        (ProtocolKind::Cumulative, DecoderKind::Majority { epsilon: 1.0 }),
    ];
    let stdout = std::io::stdout();
    for (i, (kind, decoder)) in runs.into_iter().enumerate() {
        let config = ExperimentConfig {
            protocol: ProtocolSpec::new(kind, k, bsc.clone(), bsc.clone()),
            decoder,
            n_grid: vec![n],
            trials: 20_000,
            seed: 2024,
            min_errors: 50,
        };
        let point = Experiment::new(config.clone())?.run_point(n)?;
        let mut buf = Vec::new();
        write_csv(&config.protocol, &[point], &mut buf)?;
        let text = String::from_utf8(buf).expect("csv is utf-8");
        // header only once
        let body = if i == 0 { text.as_str() } else { text.split_once('\n').map_or("", |x| x.1) };
        use std::io::Write;
        stdout.lock().write_all(body.as_bytes())?;
    }
    Ok(())
}
