use std::fmt::Write;

use vdp_conley::model::{equilibrium_report, Equilibrium, EquilibriumReport, SystemParams};

use crate::args::EquilibriaArgs;
use crate::report::{CliError, ReportBundle};

pub fn run(args: &EquilibriaArgs) -> Result<ReportBundle<EquilibriaArgs>, CliError> {
    let p = SystemParams::new(args.model.d, args.model.e, args.theta)?;
    let mut bundle = ReportBundle::new("equilibria", args.clone());
    bundle.equilibria = Equilibrium::ALL.iter().map(|&w| equilibrium_report(&p, w)).collect();
    Ok(bundle)
}

pub fn table(reports: &[EquilibriumReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let (l1, l2) = (r.spectrum.lambda1, r.spectrum.lambda2);
        let index = r.conley_index.map_or("-".to_string(), |i| format!("[{i}]"));
        writeln!(
            out,
            "{}  {:<11}  {:<24}  lambda = {:.6}{:+.6}i, {:.6}{:+.6}i  CH = {index}",
            r.which,
            format!("({}, 0)", r.location.x),
            r.class.to_string(),
            l1.re,
            l1.im,
            l2.re,
            l2.im,
        )
        .expect("writing to a String");
    }
    out
}

pub fn text(bundle: &ReportBundle<EquilibriaArgs>) -> String {
    let c = &bundle.provenance.config;
    format!("d = {}, e = {}, theta = {}\n{}", c.model.d, c.model.e, c.theta, table(&bundle.equilibria))
}
