use std::io::{self, Read, Write};

use num_complex::Complex64;

use super::{ChannelCoefficientTensor, TensorMeta};
use crate::scenario::{LinkState, ScenarioKind};

/// First eight bytes of a binary tensor file.
pub const TENSOR_MAGIC: &[u8; 8] = b"CHSIMTN1";
pub const TENSOR_VERSION: u32 = 1;

/// One row per coefficient: `u,s,n,t_s,re,im,delay_s`.
pub fn write_tensor_csv<W: Write>(t: &ChannelCoefficientTensor, mut w: W) -> io::Result<()> {
    writeln!(w, "u,s,n,t_s,re,im,delay_s")?;
    let [nu, ns, nn, nt] = t.dims;
    for u in 0..nu {
        for s in 0..ns {
            for n in 0..nn {
                for k in 0..nt {
                    let h = t.get(u, s, n, k);
                    writeln!(w, "{u},{s},{n},{},{},{},{}", t.times[k], h.re, h.im, t.delays[n])?;
                }
            }
        }
    }
    Ok(())
}

/// Binary layout, all little-endian: magic, u32 version, u64 U, S, N, T,
/// f64 f_c, u64 seed, N f64 delays, T f64 times, then U·S·N·T (re, im)
/// f64 pairs in row-major `[u][s][n][t]` order.
pub fn write_tensor_binary<W: Write>(t: &ChannelCoefficientTensor, mut w: W) -> io::Result<()> {
    w.write_all(TENSOR_MAGIC)?;
    w.write_all(&TENSOR_VERSION.to_le_bytes())?;
    for d in t.dims {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    w.write_all(&t.meta.f_c.to_le_bytes())?;
    w.write_all(&t.meta.seed.to_le_bytes())?;
    for v in t.delays.iter().chain(&t.times) {
        w.write_all(&v.to_le_bytes())?;
    }
    for h in &t.data {
        w.write_all(&h.re.to_le_bytes())?;
        w.write_all(&h.im.to_le_bytes())?;
    }
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> io::Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

/// Read a binary tensor. Metadata not stored in the file (scenario,
/// losses) comes back as placeholders.
pub fn read_tensor_binary<R: Read>(mut r: R) -> io::Result<ChannelCoefficientTensor> {
    let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != TENSOR_MAGIC {
        return Err(bad("not a chansim tensor file"));
    }
    let mut v = [0u8; 4];
    r.read_exact(&mut v)?;
    if u32::from_le_bytes(v) != TENSOR_VERSION {
        return Err(bad("unsupported tensor file version"));
    }
    let mut dims = [0usize; 4];
    for d in &mut dims {
        *d = usize::try_from(read_u64(&mut r)?).map_err(|_| bad("dimension overflow"))?;
    }
    let f_c = read_f64(&mut r)?;
    let seed = read_u64(&mut r)?;
    let delays = (0..dims[2]).map(|_| read_f64(&mut r)).collect::<io::Result<Vec<_>>>()?;
    let times = (0..dims[3]).map(|_| read_f64(&mut r)).collect::<io::Result<Vec<_>>>()?;
    let total = dims
        .iter()
        .try_fold(1usize, |a, d| a.checked_mul(*d))
        .ok_or_else(|| bad("dimension overflow"))?;
    let mut data = Vec::with_capacity(total);
    for _ in 0..total {
        let re = read_f64(&mut r)?;
        let im = read_f64(&mut r)?;
        data.push(Complex64::new(re, im));
    }
    Ok(ChannelCoefficientTensor {
        dims,
        data,
        delays,
        times,
        meta: TensorMeta {
            f_c,
            seed,
            scenario: ScenarioKind::Uma,
            state: LinkState::Nlos,
            pathloss_db: None,
            shadow_db: 0.0,
            o2i_db: 0.0,
            cluster_loss_db: vec![0.0; dims[2]],
        },
    })
}
