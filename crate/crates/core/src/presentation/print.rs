use std::fmt::Write;

use super::Presentation;

/// Prints a presentation back in DSL form. Parsing the output yields the same
/// presentation up to line numbers.
pub(crate) fn print_presentation(p: &Presentation) -> String {
    let mut out = String::new();
    if let Some(tag) = &p.group_tag {
        let _ = writeln!(out, "group {tag}");
    }
    for o in &p.objects {
        if o.is_zero {
            let _ = writeln!(out, "object {} zero", o.name);
        } else {
            let _ = writeln!(out, "object {}", o.name);
        }
    }
    for h in &p.homs {
        let _ = writeln!(
            out,
            "hom {} : {} -> {}",
            h.name,
            p.obj_name(h.dom),
            p.obj_name(h.cod)
        );
    }
    for c in p.corner_ids() {
        let (base, stab) = p.corner_objects(c);
        let _ = writeln!(
            out,
            "stab {} of {} via {}",
            p.obj_name(stab),
            p.obj_name(base),
            p.corner_name(c)
        );
    }
    for s in &p.sums {
        let _ = writeln!(
            out,
            "sum {} = {} (+) {} inj {} {} proj {} {}",
            p.obj_name(s.sum),
            p.obj_name(s.left),
            p.obj_name(s.right),
            p.hom_decl(s.i_left).name,
            p.hom_decl(s.i_right).name,
            p.hom_decl(s.p_left).name,
            p.hom_decl(s.p_right).name,
        );
    }
    for s in &p.splits {
        let _ = writeln!(
            out,
            "splitexact {} : {} {} {} sum {}",
            s.name,
            p.hom_decl(s.f).name,
            p.hom_decl(s.g).name,
            p.hom_decl(s.s).name,
            p.obj_name(p.sum(s.sum).sum),
        );
    }
    for h in &p.homotopies {
        let _ = writeln!(
            out,
            "homotopic {} ~ {}",
            p.hom_decl(h.f0).name,
            p.hom_decl(h.f1).name
        );
    }
    for r in &p.reps {
        let _ = write!(
            out,
            "rep {} for {} via {} invvia {}",
            p.obj_name(r.rep),
            p.obj_name(r.object),
            p.hom_name(r.iso),
            p.hom_name(r.iso_inv)
        );
        for l in &r.corner_links {
            let _ = write!(
                out,
                " link corner {} to {} via {}",
                p.corner_name(l.corner),
                p.corner_name(l.target),
                p.hom_name(l.stab_iso)
            );
        }
        for l in &r.split_links {
            let _ = write!(
                out,
                " link split {} to {} via {} {} {} sum {} inv {}",
                p.split(l.split).name,
                p.split(l.target).name,
                p.hom_name(l.pi_a),
                p.hom_name(l.pi_b),
                p.hom_name(l.pi_d),
                p.hom_name(l.sum_iso),
                p.hom_name(l.sum_iso_inv)
            );
        }
        out.push('\n');
    }
    for ((a, b), h) in p.table.iter() {
        let _ = writeln!(
            out,
            "compose {} ; {} = {}",
            p.hom_decl(a).name,
            p.hom_decl(b).name,
            p.hom_name(h)
        );
    }
    out
}
