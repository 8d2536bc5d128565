use super::{Generator, Result};
use crate::discriminators::{LsRbfDiscriminator, WRbfDiscriminator};
use crate::numerics::DenseMatrix;

/// Critic-ascent generator loss `-mean_k D(G(z_k))` with its parameter
/// gradients. Minimizing it pushes generated samples up the critic, i.e.
/// toward the regions scored as real; at matched fake/real batches both the
/// loss and the gradients vanish identically.
pub fn wgan_generator_loss_and_grad(
    gen: &mut Generator,
    noise: &DenseMatrix,
    critic: &WRbfDiscriminator,
) -> Result<(f64, Vec<f64>)> {
    let (loss, grads) = wgan_core(gen, noise, critic, true)?;
    Ok((loss.expect("loss requested"), grads))
}

/// Gradient-only variant for the training hot loop; skips the critic value,
/// which otherwise dominates the per-iteration cost on log-branch kernels.
pub fn wgan_generator_grad(
    gen: &mut Generator,
    noise: &DenseMatrix,
    critic: &WRbfDiscriminator,
) -> Result<Vec<f64>> {
    let (_, grads) = wgan_core(gen, noise, critic, false)?;
    Ok(grads)
}

fn wgan_core(
    gen: &mut Generator,
    noise: &DenseMatrix,
    critic: &WRbfDiscriminator,
    want_loss: bool,
) -> Result<(Option<f64>, Vec<f64>)> {
    let samples = gen.forward(noise)?;
    let batch = samples.rows();
    let dim = samples.cols();
    let scale = -1.0 / batch as f64;

    let mut upstream = DenseMatrix::zeros(batch, dim);
    let mut loss_acc = 0.0;
    let mut grad_buf = vec![0.0; dim];
    for i in 0..batch {
        let x = samples.row(i);
        grad_buf.iter_mut().for_each(|v| *v = 0.0);
        critic.grad_accum(x, &mut grad_buf)?;
        let row = upstream.row_mut(i);
        for (slot, g) in row.iter_mut().zip(&grad_buf) {
            *slot = scale * g;
        }
        if want_loss {
            loss_acc += critic.eval(x)?;
        }
    }
    let grads = gen.backward(&upstream)?;
    let loss = want_loss.then(|| scale * loss_acc);
    Ok((loss, grads))
}

/// Least-squares generator loss `mean_k (D(G(z_k)) - target)^2` and its
/// parameter gradients; `target` is the class label the generator aims for.
pub fn lsgan_generator_loss_and_grad(
    gen: &mut Generator,
    noise: &DenseMatrix,
    disc: &LsRbfDiscriminator,
    target: f64,
) -> Result<(f64, Vec<f64>)> {
    let samples = gen.forward(noise)?;
    let batch = samples.rows();
    let dim = samples.cols();

    let mut upstream = DenseMatrix::zeros(batch, dim);
    let mut loss = 0.0;
    for i in 0..batch {
        let x = samples.row(i);
        let residual = disc.eval(x) - target;
        loss += residual * residual;
        let g = disc.grad_x(x)?;
        let row = upstream.row_mut(i);
        let scale = 2.0 * residual / batch as f64;
        for (slot, gd) in row.iter_mut().zip(&g) {
            *slot = scale * gd;
        }
    }
    let grads = gen.backward(&upstream)?;
    Ok((loss / batch as f64, grads))
}
