//! How the fused distance splits into its word and structure parts as the
//! mixing ratio moves from pure embeddings to pure structure.

use wsmd::measures::{wmd, wsmd, CostKind, WeightScheme};
use wsmd::synthetic::{order_flip_dataset, OrderFlipConfig};

fn main() -> wsmd::Result<()> {
    let data = order_flip_dataset(&OrderFlipConfig {
        pairs: 2,
        ..Default::default()
    })?;
    for pair in &data.pairs.pairs {
        let a = data.bundles.require(&pair.id_a)?;
        let b = data.bundles.require(&pair.id_b)?;
        let base = wmd(a, b, &WeightScheme::Uniform, CostKind::Euclidean)?;
        println!("{} vs {} (paraphrase: {}), wmd = {:.4}", a.id(), b.id(), pair.gold.value() == 1.0, base.cost);
        println!("{:>6} {:>10} {:>10} {:>10} {:>8}", "lambda", "wsmd", "wmd_l", "k*smd_l", "k");
        for step in 0..=4 {
            let lambda = step as f64 / 4.0;
            let r = wsmd(a, b, &WeightScheme::Uniform, CostKind::Euclidean, lambda)?;
            println!(
                "{:>6.2} {:>10.4} {:>10.4} {:>10.4} {:>8.3}",
                lambda,
                r.distance,
                r.wmd_component,
                r.scaled_smd(),
                r.k
            );
            let recombined = (1.0 - lambda) * r.wmd_component + lambda * r.scaled_smd();
            assert!((recombined - r.distance).abs() < 1e-9);
        }
        println!();
    }
    Ok(())
}
