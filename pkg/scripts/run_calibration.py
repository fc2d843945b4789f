#!/usr/bin/env python3
"""Calibrate motion and decision parameters against a trajectory dataset.

Two genetic-algorithm rounds: the first fits the twelve motion genes by
minimising the mean position error between replayed and observed
trajectories; the second fits the six decision-utility genes by
maximising agreement with the annotated decisions. Defaults are sized
for the bundled synthetic dataset (about half a minute) — raise
--population/--generations for real work.

Usage: python3 scripts/run_calibration.py [--data-dir data] [--out-dir calib_out]
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from sharedspace.calibrate import (
    GaConfig,
    GAME_GENE_NAMES,
    SFM_GENE_NAMES,
    build_calibration_set,
    decode_game,
    decode_sfm,
    default_bounds,
    fitness_game,
    fitness_sfm,
    ga_optimize,
    game_objective,
    game_reference_values,
    sfm_objective,
    sfm_reference_values,
    train_test_split,
    write_history_csv,
)
from sharedspace.dataio import load_annotations, load_trajectories
from sharedspace.params import ParameterSet, parameter_set_to_dict, save_parameter_set
from sharedspace.scene import load_scene


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--data-dir", default="data")
    parser.add_argument("--out-dir", default="calib_out")
    parser.add_argument("--regime", default="hbs", choices=["hbs", "dut"])
    parser.add_argument("--population", type=int, default=24)
    parser.add_argument("--generations", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--train-fraction", type=float, default=0.66)
    args = parser.parse_args()

    data = Path(args.data_dir)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    scene = load_scene(data / "scene.json")
    records = load_trajectories(data / "trajectories.csv")
    annotations = load_annotations(data / "annotations.csv")
    items = build_calibration_set(records, annotations)
    train, test = train_test_split(items, train_fraction=args.train_fraction,
                                   seed=args.seed)
    print(f"{len(items)} scenarios -> {len(train)} train / {len(test)} test")

    base = ParameterSet.defaults(args.regime)
    config = GaConfig(population_size=args.population,
                      max_generations=args.generations, seed=args.seed)

    # Round 1: motion genes against observed positions.
    bounds = default_bounds(sfm_reference_values(base.sfm))
    result = ga_optimize(bounds, sfm_objective(train, scene, base), config)
    fitted = decode_sfm(result.best_genes, base)
    write_history_csv(result.history, out / "history_sfm.csv")
    print(f"motion fit: train error {result.best_fitness:.4f} m "
          f"({result.evaluations} evaluations)")
    if test:
        holdout = fitness_sfm(result.best_genes, test, scene, base)
        print(f"motion fit: held-out error {holdout:.4f} m")

    # Round 2: decision-utility genes against annotated decisions,
    # replayed with the freshly fitted motion parameters.
    bounds = default_bounds(game_reference_values(fitted.game))
    result = ga_optimize(bounds, game_objective(train, scene, fitted), config)
    fitted = decode_game(result.best_genes, fitted)
    write_history_csv(result.history, out / "history_game.csv")
    print(f"decision fit: train agreement {-result.best_fitness:.4f}")
    if test:
        holdout = fitness_game(result.best_genes, test, scene, fitted)
        print(f"decision fit: held-out agreement {holdout:.4f}")

    save_parameter_set(fitted, out / "best_params.json")
    (out / "gene_names.json").write_text(json.dumps(
        {"sfm": list(SFM_GENE_NAMES), "game": list(GAME_GENE_NAMES)}, indent=2,
    ) + "\n")
    print(f"fitted parameters written to {out}/best_params.json")
    print(json.dumps(parameter_set_to_dict(fitted), indent=2))


if __name__ == "__main__":
    main()
