use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::Path;

use oscint_core::fichtenholz::{default_min_digits, telescope_fill, VTable};
use oscint_core::{Error, PrecisionContext, Result};

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Config(format!("cache {}: {e}", path.display()))
}

/// Whether `table` holds every (k ≤ k_max, 1 ≤ s ≤ s_max) entry with at
/// least `min_digits` digits.
pub fn covers(table: &VTable, k_max: u32, s_max: u32, min_digits: u32) -> bool {
    (0..=k_max).all(|k| {
        (1..=s_max).all(|s| table.get(k, s).is_some_and(|e| e.digits >= min_digits))
    })
}

fn read_locked(ctx: &PrecisionContext, file: &mut File) -> Result<VTable> {
    let mut text = String::new();
    file.seek(SeekFrom::Start(0))
        .and_then(|_| file.read_to_string(&mut text))
        .map_err(|e| Error::Config(format!("reading cache: {e}")))?;
    VTable::read_csv(ctx, ctx.pi(), text.as_bytes())
}

fn write_locked(ctx: &PrecisionContext, file: &mut File, table: &VTable) -> Result<()> {
    let text = table.to_csv_string(ctx.working_digits() as usize);
    file.set_len(0)
        .and_then(|_| file.seek(SeekFrom::Start(0)))
        .and_then(|_| file.write_all(text.as_bytes()))
        .and_then(|_| file.flush())
        .map_err(|e| Error::Config(format!("writing cache: {e}")))
}

/// Reads a cached V table under an exclusive lock.
pub fn read(ctx: &PrecisionContext, path: &Path) -> Result<VTable> {
    let mut file = File::open(path).map_err(|e| io_error(path, e))?;
    file.lock().map_err(|e| io_error(path, e))?;
    read_locked(ctx, &mut file)
}

/// Writes `table` to `path`, replacing its contents, under an exclusive lock.
pub fn write(ctx: &PrecisionContext, path: &Path, table: &VTable) -> Result<()> {
    let mut file = OpenOptions::new()
        .read(true)
        .write(true)
        .create(true)
        .truncate(false)
        .open(path)
        .map_err(|e| io_error(path, e))?;
    file.lock().map_err(|e| io_error(path, e))?;
    write_locked(ctx, &mut file, table)
}

/// V(π,k,s) for k ≤ k_max, s ≤ s_max, served from the cache at `path` when it
/// already covers the request, otherwise computed and written back.
pub fn load_or_build(ctx: &PrecisionContext, path: Option<&Path>, k_max: u32, s_max: u32) -> Result<VTable> {
    let min_digits = default_min_digits(ctx);
    let Some(path) = path else {
        return telescope_fill(ctx, k_max, s_max, None);
    };
    let mut file = OpenOptions::new()
        .read(true)
        .write(true)
        .create(true)
        .truncate(false)
        .open(path)
        .map_err(|e| io_error(path, e))?;
    file.lock().map_err(|e| io_error(path, e))?;
    let cached = read_locked(ctx, &mut file)?;
    if covers(&cached, k_max, s_max, min_digits) {
        return Ok(cached);
    }
    // widen to whatever the cache already held so nothing is lost
    let (mut k_all, mut s_all) = (k_max, s_max);
    for (key, _) in cached.entries() {
        k_all = k_all.max(key.k);
        s_all = s_all.max(key.s);
    }
    let table = telescope_fill(ctx, k_all, s_all, None)?;
    write_locked(ctx, &mut file, &table)?;
    Ok(table)
}
