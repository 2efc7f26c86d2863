//! The general-DMC teacher on a ternary observation channel: exact block
//! LLR law, the g table, one encoded block and its decoded evidence.

use twohop::channel::ChannelDescriptor;
use twohop::decoder::{block_llr_fast, BlockLlrTables};
use twohop::harness::exact_block_verification;
use twohop::protocol::{ProtocolKind, ProtocolSpec};

fn main() -> twohop::Result<()> {
    let spec = ProtocolSpec::new(
        ProtocolKind::DmcBlock,
        8,
        ChannelDescriptor::General { row0: vec![0.6, 0.3, 0.1], row1: vec![0.1, 0.3, 0.6] },
        ChannelDescriptor::Bsc { p: 0.2 },
    );
    let protocol = spec.compile()?;
    let d = protocol.dmc_block().expect("dmc-block");
    println!("s_bar = {:.4}, mu_max = {:.6}", d.s_bar, d.mu_max);
    println!("       l      P(L0>=l)    P(L1<=l)   g");
    for i in 0..d.dist.len() {
        println!(
            "  {:8.4}  {:.4e}  {:.4e}  {}",
            d.dist.support[i].to_f64(),
            d.dist.tail0_geq[i],
            d.dist.tail1_leq[i],
            d.g.values[i]
        );
    }

    let y = [2, 2, 1, 0, 2, 1, 2, 2];
    let x = protocol.teach_block(&y)?;
    println!("observed {y:?} -> sends {x:?}");
    let tables = BlockLlrTables::for_protocol(&protocol)?;
    let w: Vec<usize> = x.iter().map(|&b| b as usize).collect();
    let r = block_llr_fast(&w, &tables)?;
    println!("noiseless copy decodes to LLR {:.4} with {} reads", r.likelihood.llr, r.reads);

    let v = exact_block_verification(&protocol)?;
    println!("exact rho_W(s_bar) = {:.4e} <= bound {:.4e}: {}", v.rho_w_tilted.unwrap_or(f64::NAN), v.bound, v.passes);
    Ok(())
}
