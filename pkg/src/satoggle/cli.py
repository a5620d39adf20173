"""Command-line client for the simulator service.

Every subcommand builds a request and sends it over HTTP.  By default the
service app is mounted in-process (no sockets, nothing to start first);
pass --server to aim the same requests at a running instance instead.
Exit codes: 0 success, 2 bad arguments, 3 workload I/O error, 4 internal
error.
"""

from __future__ import annotations

import asyncio
import json
import sys

import click
import httpx

EXIT_BAD_ARGS = 2
EXIT_WORKLOAD_IO = 3
EXIT_INTERNAL = 4

_STATUS_TO_EXIT = {400: EXIT_BAD_ARGS, 422: EXIT_BAD_ARGS, 404: EXIT_WORKLOAD_IO}


async def _apost(server: str | None, path: str, payload: dict) -> httpx.Response:
    if server:
        async with httpx.AsyncClient(base_url=server, timeout=600.0) as client:
            return await client.post(path, json=payload)
    from .service.app import app  # imported lazily; pulls in numpy et al.
    # raise_app_exceptions=False makes in-process behave like a remote
    # server: an internal bug becomes a 500 response, hence exit code 4.
    transport = httpx.ASGITransport(app=app, raise_app_exceptions=False)
    async with httpx.AsyncClient(transport=transport, timeout=600.0,
                                 base_url="http://satoggle.local") as client:
        return await client.post(path, json=payload)


def _post(server: str | None, path: str, payload: dict) -> dict:
    try:
        resp = asyncio.run(_apost(server, path, payload))
    except httpx.HTTPError as e:
        click.echo(f"error: cannot reach service: {e}", err=True)
        sys.exit(EXIT_INTERNAL)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail")
        except ValueError:
            detail = resp.text
        click.echo(f"error: {detail}", err=True)
        sys.exit(_STATUS_TO_EXIT.get(resp.status_code, EXIT_INTERNAL))
    return resp.json()


def _parse_layer_option(text: str) -> dict:
    """One --layer value: comma-separated key=value pairs.

    Example: name=conv1,kind=cnn-like,m=64,k=147,n=64,sigma=0.05,zero_fraction=0.4
    """
    fields: dict = {}
    for pair in text.split(","):
        if "=" not in pair:
            raise click.BadParameter(f"expected key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        key = key.strip()
        if key in ("m", "k", "n"):
            fields[key] = int(value)
        elif key in ("sigma", "zero_fraction"):
            fields[key] = float(value)
        elif key in ("name", "kind"):
            fields[key] = value.strip()
        else:
            raise click.BadParameter(f"unknown layer field {key!r}")
    for required in ("name", "kind", "m", "k", "n"):
        if required not in fields:
            raise click.BadParameter(f"--layer needs {required}=...")
    return fields


def _array_options(f):
    f = click.option("--segments", default="0:7", show_default=True,
                     help="Coded bus segments as offset:width[,offset:width...].")(f)
    f = click.option("--zvcg/--no-zvcg", default=False, show_default=True,
                     help="Zero-value clock gating on the input stream.")(f)
    f = click.option("--bic/--no-bic", default=False, show_default=True,
                     help="Bus-invert coding on the weight stream.")(f)
    f = click.option("--cols", default=16, show_default=True)(f)
    f = click.option("--rows", default=16, show_default=True)(f)
    return f


@click.group()
def main() -> None:
    """Switching-activity simulator for a Bfloat16 systolic array."""


@main.command()
@click.option("--manifest", type=click.Path(), help="Model manifest to run.")
@click.option("--synth-spec", type=click.Path(),
              help="JSON synth spec to generate and run instead of a manifest.")
@click.option("--out", required=True, type=click.Path(), help="Output directory.")
@_array_options
@click.option("--acc-mode", default="bf16-per-step", show_default=True,
              type=click.Choice(["bf16-per-step", "single-accumulate"]))
@click.option("--preset", type=click.Choice(["powersave"]),
              help="powersave enables both features with default settings.")
@click.option("--seed", default=0, show_default=True,
              help="Seed for --synth-spec generation.")
@click.option("--server", default=None, help="Remote service URL (default: in-process).")
def simulate(manifest, synth_spec, out, rows, cols, bic, zvcg, segments,
             acc_mode, preset, seed, server) -> None:
    """Run every layer of a workload and write counters + outputs."""
    if bool(manifest) == bool(synth_spec):
        click.echo("error: give exactly one of --manifest or --synth-spec", err=True)
        sys.exit(EXIT_BAD_ARGS)
    if preset == "powersave":
        bic = zvcg = True
    if synth_spec:
        try:
            spec = json.loads(open(synth_spec).read())
        except (OSError, ValueError) as e:
            click.echo(f"error: cannot read synth spec: {e}", err=True)
            sys.exit(EXIT_WORKLOAD_IO)
        spec.setdefault("seed", seed)
        spec["out_dir"] = f"{out}/synth"
        result = _post(server, "/synth", spec)
        manifest = result["manifest"]
    summary = _post(server, "/simulate", {
        "manifest": manifest, "out_dir": out,
        "array": {"rows": rows, "cols": cols, "bic": bic, "zvcg": zvcg,
                  "segments": segments, "acc_mode": acc_mode}})
    totals = summary["totals"]
    click.echo(f"model {summary['model_name']}: {len(summary['layers'])} layers, "
               f"{totals['cycles']} cycles, "
               f"{totals['macs_performed']} MACs ({totals['macs_skipped']} skipped)")
    click.echo(f"wrote {out}/run.json")


@main.command()
@click.option("--manifest", required=True, type=click.Path())
@click.option("--out", required=True, type=click.Path())
@click.option("--server", default=None)
def analyze(manifest, out, server) -> None:
    """Write per-layer field histograms and zero fractions."""
    summary = _post(server, "/analyze", {"manifest": manifest, "out_dir": out})
    click.echo(f"model {summary['model_name']}: "
               f"{len(summary['layers'])} layers analyzed, wrote {out}/analysis.json")


@main.command()
@click.option("--model-name", required=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path())
@click.option("--layer", "layers", multiple=True, required=True,
              help="name=...,kind=...,m=...,k=...,n=...[,sigma=...][,zero_fraction=...]")
@click.option("--server", default=None)
def synth(model_name, seed, out, layers, server) -> None:
    """Generate a synthetic model (manifest + raw bf16 tensors)."""
    payload = {"model_name": model_name, "seed": seed, "out_dir": out,
               "layers": [_parse_layer_option(text) for text in layers]}
    result = _post(server, "/synth", payload)
    click.echo(f"wrote {result['manifest']} ({len(result['layers'])} layers)")


@main.command()
@click.option("--baseline", "baseline_dir", required=True, type=click.Path(),
              help="simulate output directory of the baseline run.")
@click.option("--proposed", "proposed_dir", required=True, type=click.Path(),
              help="simulate output directory of the run under comparison.")
@click.option("--out", required=True, type=click.Path())
@click.option("--format", "fmt", default="both", show_default=True,
              type=click.Choice(["csv", "json", "both"]))
@click.option("--proxy-config", type=click.Path(),
              help="JSON file overriding power-proxy weights.")
@click.option("--server", default=None)
def compare(baseline_dir, proposed_dir, out, fmt, proxy_config, server) -> None:
    """Compare two simulate runs and write the reduction report."""
    formats = ["csv", "json"] if fmt == "both" else [fmt]
    payload = {"baseline_dir": baseline_dir, "proposed_dir": proposed_dir,
               "out_dir": out, "formats": formats}
    if proxy_config:
        try:
            payload["proxy"] = json.loads(open(proxy_config).read())
        except (OSError, ValueError) as e:
            click.echo(f"error: cannot read proxy config: {e}", err=True)
            sys.exit(EXIT_WORKLOAD_IO)
    report = _post(server, "/compare", payload)
    overall = report["overall"]
    ref = report["reference_points"]
    click.echo(f"overall: streaming {overall['stream_red_pct']:.2f}% lower, "
               f"total {overall['total_red_pct']:.2f}% lower than baseline")
    click.echo(
        "published results for the modeled hardware: "
        f"{ref['switching_activity_reduction_avg_pct']:.0f}% average switching "
        f"reduction, {ref['per_layer_power_reduction_range_pct'][0]:.0f}-"
        f"{ref['per_layer_power_reduction_range_pct'][1]:.0f}% per-layer power, "
        f"{ref['resnet50_total_power_reduction_pct']}%/"
        f"{ref['mobilenet_total_power_reduction_pct']}% on the two reference CNNs "
        "(desk-scale numbers above are analogues, not reproductions)")
    for path in report["written"]:
        click.echo(f"wrote {path}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service.app import app
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
