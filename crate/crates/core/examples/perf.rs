use std::time::Instant;
use thetatilt_core::analysis::sl2_oracle;
use thetatilt_core::builder::*;
use thetatilt_core::rootdata::*;
use thetatilt_core::*;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("a1");
    match which {
        "a1" => {
            let rs = RootSystem::new(RootSystemSpec::Label("A1".into())).unwrap();
            let cfg = PrimeConfig::new(5, false).unwrap();
            for m in [20i64, 35, 50] {
                let t = Instant::now();
                let (obj, _) = build_s_theta(&rs, &cfg, &Weight(vec![m]), &ThetaSpec::all()).unwrap();
                println!("A1 p=5 m={m} ALL: rank {} in {:?}", obj.character().dim(), t.elapsed());
            }
        }
        "oracle" => {
            let cfg = PrimeConfig::new(5, false).unwrap();
            for m in [20u32, 35, 50] {
                let t = Instant::now();
                let obj = sl2_oracle(&cfg, m, &ThetaSpec::all()).unwrap();
                println!("oracle p=5 m={m} ALL: rank {} in {:?}", obj.character().dim(), t.elapsed());
            }
        }
        "b2" => {
            let rs = RootSystem::new(RootSystemSpec::Label("B2".into())).unwrap();
            let cfg = PrimeConfig::new(3, false).unwrap();
            for coords in [vec![1i64, 1], vec![2, 2], vec![3, 3]] {
                let t = Instant::now();
                let lam = Weight(coords.clone());
                let (obj, _) = build_s_theta(&rs, &cfg, &lam, &ThetaSpec::all()).unwrap();
                println!("B2 p=3 λ={coords:?} ALL: rank {} in {:?}", obj.character().dim(), t.elapsed());
            }
        }
        _ => {}
    }
}
