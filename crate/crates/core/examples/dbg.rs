use thetatilt_core::*;
use thetatilt_core::builder::*;
use thetatilt_core::rootdata::*;

fn main() {
    let rs = RootSystem::new(RootSystemSpec::Label("A1".into())).unwrap();
    let cfg = PrimeConfig::new(3, false).unwrap();
    let (obj, _) = build_s_theta(&rs, &cfg, &Weight(vec![3]), &ThetaSpec::finite([1])).unwrap();
    println!("ranks: {:?}", obj.ranks());
    for (k, m) in obj.e_entries() {
        // E
    }
    for (k, m) in obj.f_entries() {
        // F
    }
    let end = intertwiner_space(&obj, &obj).unwrap();
    println!("end rank = {}", end.basis.len());
    for b in &end.basis {
        println!("elem:");
        for (w, blk) in b {
            println!("  {w}: {blk:?}");
        }
    }
}
