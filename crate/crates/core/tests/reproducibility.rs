use schelling::harness::{preset, run_experiment, Execution, ExperimentSpec};
use schelling::io::csv::{write_runs, write_sweep};

fn quick(name: &str, replicates: usize, values: &[f64]) -> ExperimentSpec {
    let mut spec = preset(name).unwrap();
    spec.replicates = replicates;
    spec.sweep.as_mut().unwrap().values = values.to_vec();
    spec
}

#[test]
fn parallel_and_serial_runs_agree() {
    for spec in [
        quick("baseline", 6, &[0.3, 0.6, 0.9]),
        quick("net-cost-var", 4, &[0.5, 1.0]),
        quick("degree-sweep", 3, &[0.0, 3.0, 20.0]),
    ] {
        let serial = run_experiment(&spec, Execution::Serial).unwrap();
        let parallel = run_experiment(&spec, Execution::Parallel).unwrap();
        assert_eq!(serial, parallel, "{}", spec.name);
    }
}

#[test]
fn same_spec_gives_identical_bytes() {
    let spec = quick("net-nocost", 5, &[0.0, 0.4, 0.8]);
    let a = run_experiment(&spec, Execution::Parallel).unwrap();
    let b = run_experiment(&spec, Execution::Parallel).unwrap();
    assert_eq!(write_sweep(&a).unwrap(), write_sweep(&b).unwrap());
    assert_eq!(write_runs(&a).unwrap(), write_runs(&b).unwrap());
}

#[test]
fn base_seed_changes_the_outcome() {
    let spec = quick("baseline", 4, &[0.6]);
    let mut other = spec.clone();
    other.base_seed += 1;
    let a = run_experiment(&spec, Execution::Serial).unwrap();
    let b = run_experiment(&other, Execution::Serial).unwrap();
    assert_ne!(write_runs(&a).unwrap(), write_runs(&b).unwrap());
}

#[test]
fn replicate_results_do_not_depend_on_h() {
    // Replicate h uses the same seeds whether H is 3 or 5.
    let small = run_experiment(&quick("baseline", 3, &[0.7]), Execution::Serial).unwrap();
    let large = run_experiment(&quick("baseline", 5, &[0.7]), Execution::Serial).unwrap();
    assert_eq!(small.points[0].records[..], large.points[0].records[..3]);
}
