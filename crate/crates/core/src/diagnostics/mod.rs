//! Regularity estimates measured on solved fields, and the exponent,
//! Moser and Gehring arithmetic.

mod exponents;
mod fields;
mod measures;

pub use exponents::{
    a_alpha, hd_exponents, moser_alpha_sequence, moser_bound, moser_gamma, moser_log_product,
    ExponentChain, MoserBound, MoserParams,
};
pub use fields::{
    average_energy, cell_average, cell_grad_sq, cells_in, simplices_in, v_fields, v_gradients,
    VGradients,
};
pub use measures::{
    attach_fitted_exponent, caccioppoli_check, fit_power_law, gehring_selfimprove,
    higher_diff_measure, log_decay_profile, reverse_holder_constant, reverse_holder_scan,
    stress_integrability, sup_grad_measure, CaccioppoliReport, CubeData, GehringReport,
    LogDecayProfile, PowerFit, ReverseHolderScan,
};
