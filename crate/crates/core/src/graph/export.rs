use std::io::Write;

use crate::Scalar;

use super::TwinStore;

/// Writes `record_id,pt_id,gen_tick,f0..f{F-1}` rows in record-id order.
pub fn write_records_csv<T: Scalar, S: TwinStore<T> + ?Sized, W: Write>(store: &S, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["record_id".to_string(), "pt_id".into(), "gen_tick".into()];
    header.extend((0..store.n_features()).map(|j| format!("f{j}")));
    w.write_record(&header)?;
    for r in store.records() {
        let mut row = vec![r.id.to_string(), r.pt.to_string(), r.gen_tick.to_string()];
        row.extend(r.features.iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `edge_kind,src,dst,weight_or_dt` rows in creation order.
pub fn write_edges_csv<T: Scalar, S: TwinStore<T> + ?Sized, W: Write>(store: &S, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["edge_kind", "src", "dst", "weight_or_dt"])?;
    for e in store.edges() {
        w.write_record([e.kind.as_str().to_string(), e.src.to_string(), e.dst.to_string(), e.value.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
