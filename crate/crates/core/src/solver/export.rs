use std::io::{self, Write};

use crate::model::DiscreteField;

/// Decimal scientific notation with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// `node,x1..xn,u1..uN`, one record per node.
pub fn write_nodes_csv(field: &DiscreteField, mut w: impl Write) -> io::Result<()> {
    let g = field.grid();
    let mut header = vec!["node".to_string()];
    header.extend((1..=g.dim()).map(|i| format!("x{i}")));
    header.extend((1..=field.ncomp()).map(|a| format!("u{a}")));
    writeln!(w, "{}", header.join(","))?;
    for v in 0..g.node_count() {
        let mut rec = vec![v.to_string()];
        rec.extend(g.node_coords(v).into_iter().map(fmt17));
        rec.extend((0..field.ncomp()).map(|a| fmt17(field.value(v, a))));
        writeln!(w, "{}", rec.join(","))?;
    }
    Ok(())
}

/// `simplex,g_a_i...`, one record per simplex, entries row-major.
pub fn write_gradients_csv(field: &DiscreteField, mut w: impl Write) -> io::Result<()> {
    let n = field.grid().dim();
    let mut header = vec!["simplex".to_string()];
    for a in 1..=field.ncomp() {
        header.extend((1..=n).map(|i| format!("g{a}_{i}")));
    }
    writeln!(w, "{}", header.join(","))?;
    for (k, g) in field.gradients().iter().enumerate() {
        let mut rec = vec![k.to_string()];
        rec.extend(g.as_slice().iter().map(|&x| fmt17(x)));
        writeln!(w, "{}", rec.join(","))?;
    }
    Ok(())
}
