//! Table reads of the incremental block decoder against the naive double
//! loop, for growing block lengths.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twohop::channel::ChannelDescriptor;
use twohop::decoder::{block_llr_fast, block_llr_naive, BlockLlrTables};
use twohop::protocol::{ProtocolKind, ProtocolSpec};

fn main() -> twohop::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    println!("     k  latents  fast reads  naive reads  |llr diff|");
    for k in [10, 100, 1000, 5000] {
        let b = ChannelDescriptor::Bsc { p: 0.25 };
        let protocol = ProtocolSpec::new(ProtocolKind::BscBlock, k, b.clone(), b).compile()?;
        let tables = BlockLlrTables::for_protocol(&protocol)?;
        let w: Vec<usize> = (0..k).map(|_| rng.random_range(0..2)).collect();
        let fast = block_llr_fast(&w, &tables)?;
        let naive = block_llr_naive(&w, &tables)?;
        println!(
            "  {k:4}  {:7}  {:10}  {:11}  {:.2e}",
            tables.latent_count(),
            fast.reads,
            k * tables.latent_count(),
            (fast.likelihood.llr - naive.llr).abs()
        );
    }
    Ok(())
}
