//! Two-round exponents against the time split `gamma` for a BSC(0.2) first
//! round and a reverse Z(0.8) second round. With one round of feedback the
//! exponent is flat; without it the curve dips in the middle.
//!
//! ```bash
//! cargo run --example feedback_curve > curve.csv
//! ```

use twohop::channel::{make_bsc, make_reverse_z};
use twohop::exponent::{e1, feedback_exponent_bsc_rz};

fn main() {
    let (p, q) = (0.2, 0.8);
    let (ch_p, ch_q) = (make_bsc(p).unwrap(), make_reverse_z(q).unwrap());
    println!("gamma,feedback,no_feedback");
    for i in 0..=20 {
        let gamma = i as f64 / 20.0;
        let with = feedback_exponent_bsc_rz(p, q, gamma).unwrap();
        let without = e1(&ch_p, &ch_q, gamma).unwrap().rate;
        println!("{gamma:.2},{with:.6},{without:.6}");
    }
}
