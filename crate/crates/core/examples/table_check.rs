use hyperq::analysis::{measures_with_kappa_lo, DirectionSet};
use hyperq::datagen::{generate, Family, GenSpec};
use hyperq::{HPoint, SolverConfig};

const T2: [[f64; 7]; 4] = [
    [2.785, 2.267, 0.392, 0.160, 29.219, 29.070, 0.663],
    [1.507, 1.333, 0.346, 0.141, 8.282, 8.685, 0.271],
    [0.894, 0.870, 0.155, 0.068, 5.970, 6.351, 0.155],
    [0.723, 0.645, 0.035, 0.012, 5.072, 5.466, 0.123],
];
const T4: [[f64; 7]; 4] = [
    [7.768, 6.466, 0.342, 0.096, 140.534, 143.326, 0.205],
    [5.510, 5.407, 0.310, 0.086, 30.769, 33.394, 0.098],
    [4.399, 4.322, 0.182, 0.047, 18.781, 20.196, 0.082],
    [4.055, 3.709, 0.019, 0.002, 14.305, 15.070, 0.051],
];

fn main() {
    let start = std::time::Instant::now();
    let o = HPoint::origin(2);
    let dirs = DirectionSet::canonical(&o, 24).unwrap();
    let cfg = SolverConfig::default();
    let seeds: Vec<u64> = (1..=20).collect();

    for (tname, beta, beta_hi, table) in [("T2", 0.5, 0.8, &T2), ("T4", 0.98, 0.98, &T4)] {
        // rows[nu][seed] = seven designated measures
        let mut rows = vec![vec![[0.0f64; 7]; seeds.len()]; 4];
        for (si, &seed) in seeds.iter().enumerate() {
            for nu in 0..4usize {
                for (fam, cols) in [
                    (Family::Dispersion, [0usize, 1].as_slice()),
                    (Family::Skewness, &[2, 3]),
                    (Family::Kurtosis, &[4, 5]),
                    (Family::Spherical, &[6]),
                ] {
                    let data = generate(&GenSpec::new(fam, nu as u8, seed)).unwrap();
                    let rep = measures_with_kappa_lo(&data, beta, beta_hi, 0.2, &dirs, &cfg)
                        .unwrap_or_else(|e| panic!("{tname} {fam:?} nu={nu} seed={seed}: {e}"));
                    let vals = [
                        rep.delta1,
                        rep.delta2,
                        rep.gamma1,
                        rep.gamma2_norm,
                        rep.kappa1,
                        rep.kappa2,
                        rep.alpha,
                    ];
                    for &c in cols {
                        rows[nu][si][c] = vals[c];
                    }
                }
            }
        }
        println!("== {tname} (elapsed {:.0?}) ==", start.elapsed());
        let names = ["d1", "d2", "g1", "g2n", "k1", "k2", "al"];
        for nu in 0..4 {
            let mut line = format!("nu={nu}");
            for c in 0..7 {
                let mean: f64 =
                    rows[nu].iter().map(|r| r[c]).sum::<f64>() / seeds.len() as f64;
                let t = table[nu][c];
                line += &format!("  {}={:.3}/{:.3}({:+.0}%)", names[c], mean, t, 100.0 * (mean / t - 1.0));
            }
            println!("{line}");
        }
        for c in 0..7 {
            let mono = (0..seeds.len())
                .filter(|&si| (1..4).all(|nu| rows[nu][si][c] < rows[nu - 1][si][c]))
                .count();
            print!("mono[{}]={mono}/20 ", names[c]);
        }
        println!();
    }
    println!("total {:.0?}", start.elapsed());
}
