use std::io::Write;

use witness_vqe::par::Jobs;
use witness_vqe::spectrum::{ground_energy, separable_energy, SeparableOptions};

use crate::{load_chain, CliError, GroundArgs};

pub(crate) fn run(args: &GroundArgs, jobs: Jobs, out: &mut dyn Write) -> Result<(), CliError> {
    let h = load_chain(&args.chain)?;
    let e0 = ground_energy(&h)?;
    let sep = separable_energy(
        &h,
        &SeparableOptions {
            seed: args.seed,
            jobs,
            ..Default::default()
        },
    )?;
    let gap = sep.energy - e0;
    let mut table = format!("n_qubits  {}\n", h.n_qubits());
    table += &format!("E_0       {e0:.6}\n");
    table += &format!("E_sep     {:.6}\n", sep.energy);
    table += &format!("G         {gap:.6}\n");
    if gap <= 0.0 {
        table += "warning: non-positive gap, the witness cannot certify entanglement\n";
    }
    out.write_all(table.as_bytes())
        .map_err(|e| CliError::Runtime(e.to_string()))
}
