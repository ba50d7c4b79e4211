use wpnoma::analytic::{upsilon_ii_chebyshev, upsilon_ii_direct};
use wpnoma::model::SystemParams;

fn main() {
    for ps in [5.0, 15.0, 25.0, 35.0] {
        for se in [0.0, 1e-3, 1e-2, 5e-2, 1e-1] {
            let p = SystemParams { sigma_e2: se, ..SystemParams::default() }.with_p_s_db(ps);
            let d = upsilon_ii_direct(&p).unwrap();
            let js = [5usize, 10, 20, 40, 80, 160, 320];
            let v: Vec<f64> = js.iter().map(|&j| upsilon_ii_chebyshev(&p, j).unwrap()).collect();
            let diffs: Vec<String> = v.windows(2).map(|w| format!("{:.2e}", (w[1] - w[0]).abs())).collect();
            let rel30 = (upsilon_ii_chebyshev(&p, 30).unwrap() - d).abs() / d;
            println!("ps {ps} se {se}: direct {d:.6e} rel30 {rel30:.2e} diffs {}", diffs.join(" "));
        }
    }
}
