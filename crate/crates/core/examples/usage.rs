use wavestab_core::action::{action_hessian, to_matrix};
use wavestab_core::model::reference_focusing;
use wavestab_core::profile::{solve_profile, WaveParams};

fn main() -> wavestab_core::Result<()> {
    let model = reference_focusing();
    let params = WaveParams::new(-0.375, 0.0, -1.0, 0.0);
    let profile = solve_profile(&model, &params, 256)?;
    let action = action_hessian(&model, &params)?;
    println!("period {}", profile.x_period);
    println!("det H {}", to_matrix(&action.hess).determinant());
    Ok(())
}
