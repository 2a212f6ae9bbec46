//! Resonant / non-resonant split of the cubic term and the explicit form H.

use mkdv_lab::ensemble::random_real_field;
use mkdv_lab::nonlinearity::{
    direct_nonlinearity, eval_h_form, nr_split_k0, nr_trilinear_fast, nr_trilinear_naive, resonant_term, select_k0,
    NRSplitConfig,
};
use mkdv_lab::spectral::sobolev_norm;

fn main() {
    let u = random_real_field(7, 24, 0.6);
    let direct = direct_nonlinearity(&u).unwrap();
    let fast = nr_trilinear_fast(&u, &u, &u).unwrap();
    let split = &fast + &resonant_term(&u);
    println!("direct vs NR + resonant: {:.2e}", direct.max_abs_diff(&split));
    println!("fast vs naive NR:        {:.2e}", fast.max_abs_diff(&nr_trilinear_naive(&u, &u, &u).unwrap()));

    let k0 = select_k0(&u, 24);
    let (low, high) = nr_split_k0(&u, &u, &u, NRSplitConfig { k0 }).unwrap();
    println!("K0 = {k0}: |NR_low| = {:.4}, |NR_high| = {:.4}", sobolev_norm(&low, 0.0), sobolev_norm(&high, 0.0));

    let h = eval_h_form(&u, &u, &u, &u, NRSplitConfig { k0 }).unwrap();
    println!("|H(u,u,u)|_H^0.5 = {:.4e}", sobolev_norm(&h, 0.5));
}
