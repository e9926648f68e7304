use convex_leaves::group::*;
use convex_leaves::projlin::eigen_real;
fn main() {
    let rep4 = lift_principal(&fuchsian_octagon_rep()).unwrap();
    let bent = bend(&rep4, &separating_curve(), &[1.0, 0.0, 0.0, -1.0], 0.1, 1e-6, 1e-8).unwrap();
    let mut causes: std::collections::BTreeMap<String, usize> = Default::default();
    let mut drifts: Vec<f64> = vec![];
    for w in enumerate_words(4) {
        if w.len() != 4 { continue; }
        let m = evaluate(&bent, &w);
        match eigen_real(&m, 1e-6, 1e-8) {
            Ok(s) => {
                let sum: f64 = s.log_moduli().iter().sum();
                drifts.push(sum.abs());
                if sum.abs() > 1e-5 { *causes.entry("drift>1e-5".into()).or_default() += 1; }
            }
            Err(e) => {
                let tag = format!("{e}").chars().take(44).collect::<String>();
                *causes.entry(tag).or_default() += 1;
            }
        }
    }
    drifts.sort_by(|a,b| a.partial_cmp(b).unwrap());
    println!("causes: {causes:#?}");
    if !drifts.is_empty() {
        println!("drift median {:.2e} p90 {:.2e} max {:.2e} (n={})",
            drifts[drifts.len()/2], drifts[drifts.len()*9/10], drifts[drifts.len()-1], drifts.len());
    }
}
