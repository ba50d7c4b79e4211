use wpnoma::specfun::bessel_k;

const GOLDEN: &str = include_str!("data/bessel_k_golden.csv");

fn golden() -> Vec<(u32, f64, f64)> {
    GOLDEN
        .lines()
        .skip(1)
        .map(|line| {
            let mut it = line.split(',');
            let v = it.next().unwrap().parse().unwrap();
            let z = it.next().unwrap().parse().unwrap();
            let k = it.next().unwrap().parse().unwrap();
            (v, z, k)
        })
        .collect()
}

#[test]
fn matches_high_precision_table() {
    let table = golden();
    assert_eq!(table.len(), 7 * 40);
    let mut worst = (0.0f64, 0u32, 0.0f64);
    for (v, z, k) in table {
        let got = bessel_k(v, z).unwrap();
        let rel = ((got - k) / k).abs();
        if rel > worst.0 {
            worst = (rel, v, z);
        }
    }
    assert!(worst.0 <= 1e-10, "worst relative error {:e} at order {} z {}", worst.0, worst.1, worst.2);
}
