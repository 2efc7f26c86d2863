//! Achievable rates and converse bounds for a few channel pairs.
//!
//! ```bash
//! cargo run --example exponents
//! ```

use twohop::channel::{make_bsc, make_reverse_z, Dmc};
use twohop::exponent::{block_converse, one_hop_rate, trivial_converse, two_hop_rate};

fn show(name: &str, p: &Dmc, q: &Dmc) {
    let achievable = two_hop_rate(p, q, false);
    let flipped = two_hop_rate(p, q, true);
    let trivial = trivial_converse(p, q);
    println!("{name}");
    println!("  1-hop over P        {:.6}", one_hop_rate(p).rate);
    println!("  1-hop over Q        {:.6}", one_hop_rate(q).rate);
    println!("  2-hop achievable    {:.6}  (s* = {:.4})", achievable.rate, achievable.s_star);
    println!("  2-hop with flipping {:.6}", flipped.rate);
    println!("  trivial converse    {:.6}", trivial.rate);
    match block_converse(p, q).expect("valid channels") {
        Some(r) => println!("  block converse      {:.6}", r.rate),
        None => println!("  block converse      n/a (mu(s) <= mu(1 - s) fails)"),
    }
}

fn main() {
    let bsc = |p| make_bsc(p).unwrap();
    show("BSC(0.2) -> BSC(0.3)", &bsc(0.2), &bsc(0.3));
    show("BSC(0.2) -> RZ(0.8)", &bsc(0.2), &make_reverse_z(0.8).unwrap());
    let ternary = Dmc::new(vec![0.6, 0.3, 0.1], vec![0.1, 0.3, 0.6]).unwrap();
    show("ternary -> BSC(0.25)", &ternary, &bsc(0.25));
    show("RZ(0.6) -> RZ(0.6) swapped", &make_reverse_z(0.6).unwrap(), &make_reverse_z(0.6).unwrap().swap_inputs());
}
