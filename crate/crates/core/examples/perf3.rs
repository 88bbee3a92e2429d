use std::time::Instant;
use thetatilt_core::builder::*;
use thetatilt_core::rootdata::*;
use thetatilt_core::*;

fn main() {
    let rs = RootSystem::new(RootSystemSpec::Label("A1".into())).unwrap();
    let cfg = PrimeConfig::new(5, false).unwrap();
    for m in [6i64, 8, 10, 12, 14] {
        let t = Instant::now();
        let (obj, _) = build_s_theta(&rs, &cfg, &Weight(vec![m]), &ThetaSpec::all()).unwrap();
        println!("A1 p=5 m={m} ALL: rank {} in {:?}", obj.character().dim(), t.elapsed());
    }
}
