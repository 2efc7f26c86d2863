//! The feedback-free two-round converse can beat the trivial one.
//!
//! For P = RZ(0.8) and Q = BSC(0.2) both channels have the same 1-hop
//! exponent, yet `min_gamma E1` is strictly smaller.

use twohop::channel::{make_bsc, make_reverse_z};
use twohop::exponent::{check_assumption1, e1_min_over_gamma, gamma_balanced, trivial_converse, two_hop_rate};

fn main() {
    let p = make_reverse_z(0.8).unwrap();
    let q = make_bsc(0.2).unwrap();
    for (name, ch) in [("P", &p), ("Q", &q)] {
        let a = check_assumption1(ch, 1e-3).unwrap();
        println!("mu(s) <= mu(1 - s) on [0, 1/2] for {name}: {} (worst {:.2e})", a.holds, a.worst_violation);
    }
    let trivial = trivial_converse(&p, &q).rate;
    let (gamma, e1) = e1_min_over_gamma(&p, &q, 1000).unwrap();
    println!("trivial converse   {trivial:.6}");
    println!("min_gamma E1       {:.6} at gamma = {gamma:.3}", e1.rate);
    println!("2-hop achievable   {:.6}", two_hop_rate(&p, &q, false).rate);
    println!("improvement        {:.6} nats", trivial - e1.rate);
    let g = gamma_balanced(&p, &q).unwrap();
    println!("balancing gamma    {:.6} ({:?})", g.gamma, g.case);
}
