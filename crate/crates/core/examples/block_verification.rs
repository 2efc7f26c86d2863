//! Exact single-block Bhattacharyya coefficients of the BSC block protocol,
//! by enumerating all 2^k student blocks, against `(k+1)^2 e^{-k D(1/2||p)}`.

use twohop::channel::ChannelDescriptor;
use twohop::exponent::binary_kl;
use twohop::harness::exact_block_verification;
use twohop::protocol::{ProtocolKind, ProtocolSpec};

fn main() -> twohop::Result<()> {
    for p in [0.2, 0.3] {
        println!("p = {p}, D(1/2||p) = {:.6}", binary_kl(0.5, p)?);
        println!("   k      rho_W        bound   -ln(rho_W)/k   ML error");
        for k in 4..=12 {
            let b = ChannelDescriptor::Bsc { p };
            let spec = ProtocolSpec::new(ProtocolKind::BscBlock, k, b.clone(), b);
            let r = exact_block_verification(&spec.compile()?)?;
            println!(
                "  {k:2}  {:.6e}  {:.4e}   {:.6}       {:.4e}",
                r.rho_w,
                r.bound,
                -r.rho_w.ln() / k as f64,
                r.ml_error
            );
        }
    }
    Ok(())
}
