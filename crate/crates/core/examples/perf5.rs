use std::time::Instant;
use thetatilt_core::builder::*;
use thetatilt_core::rootdata::*;
use thetatilt_core::*;

fn main() {
    let rs = RootSystem::new(RootSystemSpec::Label("A1".into())).unwrap();
    let cfg = PrimeConfig::new(5, false).unwrap();
    let t = Instant::now();
    let (obj, _) = build_s_theta(&rs, &cfg, &Weight(vec![26]), &ThetaSpec::all()).unwrap();
    println!("m=26: rank {} in {:?}", obj.character().dim(), t.elapsed());
}
