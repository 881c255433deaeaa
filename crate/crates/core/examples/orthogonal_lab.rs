//! Centralizer sampling, the two structural witnesses and the congruence
//! level search.

use k3picard::lab::{
    block_rotation_witness, cm_norm_one_witness, find_congruence_level, has_root_of_unity_eigenvalue,
    order_bound_for_dim, preset, random_test_matrix, run_experiment,
};

fn main() -> k3picard::Result<()> {
    let model = preset("real-quadratic")?;
    let report = run_experiment(&model, 0, 50)?;
    println!(
        "{}: {} samples, eigenvalue-1 multiplicities {:?}, all in group {}",
        report.preset, report.samples, report.histogram, report.all_in_group
    );

    let (_, h) = block_rotation_witness()?;
    println!(
        "block rotation: root-of-unity eigenvalue {}",
        has_root_of_unity_eigenvalue(&h, order_bound_for_dim(h.rows()))
    );
    let (_, h, e) = cm_norm_one_witness()?;
    let coords: Vec<String> = e.iter().map(|c| c.to_string()).collect();
    println!(
        "CM unit ({}): root-of-unity eigenvalue {}",
        coords.join(", "),
        has_root_of_unity_eigenvalue(&h, order_bound_for_dim(h.rows()))
    );

    let g = random_test_matrix(6, 2, 1);
    let (level, runs) = find_congruence_level(&g, 3, 2, 12, 50, 1);
    println!(
        "congruence level for a random 6x6 matrix mod 3: {level:?} after {} runs",
        runs.len()
    );
    Ok(())
}
