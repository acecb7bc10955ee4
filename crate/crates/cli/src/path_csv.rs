//! CSV dump of a tracked path: parameter, knot coordinates and per-element
//! energies for every accepted sample.

use std::io::Write;

use snapkit::model::{self, Framework};
use snapkit::pathtrack::PathCertificate;
use snapkit::strain;

use crate::error::CliResult;

pub fn write_path<W: Write>(fw: &Framework, cert: &PathCertificate, out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let n = fw.dimension();
    let axes = ["x", "y", "z"];
    let mut header = vec!["t".to_string()];
    for knot in fw.knots() {
        for axis in axes.iter().take(n) {
            header.push(format!("{axis}{}", knot.id));
        }
    }
    for e in fw.bars() {
        let edge = &fw.edges()[e];
        header.push(format!("U_bar_{}_{}", edge.i, edge.j));
    }
    for plate in fw.plates() {
        header.push(format!("U_plate_{}_{}_{}", plate.knots[0], plate.knots[1], plate.knots[2]));
    }
    header.push("U_total".into());
    w.write_record(&header)?;
    let mut rows: Vec<(f64, &snapkit::Configuration)> = cert.samples.iter().map(|(t, c)| (*t, c)).collect();
    if let Some(end) = &cert.endpoint {
        if cert.success {
            rows.push((1.0, end));
        }
    }
    for (t, cfg) in rows {
        let energies = strain::element_energies(fw, &model::edge_lengths(fw, cfg))?;
        let mut record = vec![format!("{t:e}")];
        record.extend(cfg.as_slice().iter().map(|v| format!("{v:e}")));
        record.extend(energies.iter().map(|v| format!("{v:e}")));
        record.push(format!("{:e}", energies.iter().sum::<f64>()));
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| crate::error::CliError::Csv(e.into()))?;
    Ok(())
}
