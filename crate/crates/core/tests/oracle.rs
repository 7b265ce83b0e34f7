use modcond::endo::CountConfig;
use modcond::oracle::{full_pipeline_check, PipelineInputs};
use modcond::orbits::{enumerate_suborbits, EngineConfig};
use modcond::scenario::{bundled_names, Scenario, Setup, Side};

#[test]
fn pipeline_matches_oracle_on_bundled_scenarios() {
    for name in bundled_names() {
        let s = Setup::new(Scenario::load(name).unwrap()).unwrap();
        let seed = s.scenario.seed;
        let h = enumerate_suborbits(
            s.engine(Side::H, EngineConfig::default()).unwrap(),
            "H",
            seed,
        )
        .unwrap();
        let u = enumerate_suborbits(
            s.engine(Side::U, EngineConfig::default()).unwrap(),
            "U",
            seed,
        )
        .unwrap();
        for (m, _) in &s.modules {
            let rep = full_pipeline_check(&PipelineInputs {
                setup: &s,
                db_h: &h,
                db_u: &u,
                module: m,
                split_element: s.scenario.split_element,
                count: CountConfig::default(),
            })
            .unwrap();
            print!("{}", rep.to_text());
            assert!(rep.passed(), "{name}/{m}");
        }
    }
}
