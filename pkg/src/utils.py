"""
Utility functions for cfkit: configuration, presets and report formatting
"""

import json
import os
from typing import Dict, List, Sequence, Tuple

from src.cfspec import CFSpec, load_spec
from src.errors import ParseError


def _default_preset_dir() -> str:
    current_dir = os.path.dirname(os.path.abspath(__file__))
    return os.path.normpath(os.path.join(current_dir, '..', 'data', 'presets'))


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError as e:
        raise ParseError(f"{name} must be an integer, got {raw!r}") from e


def get_default_config() -> Dict:
    """
    Get default configuration.

    Environment variables:
    - CFKIT_PRESET_DIR: directory holding the preset files
    - CFKIT_LOG_LEVEL: logging level name for the CLI
    - CFKIT_DMAX: largest discriminant of Galois sweeps
    - CFKIT_F1MAX: bound on the leading coefficient in sweeps

    Returns:
        Dictionary of settings
    """
    return {
        'preset_dir': os.environ.get('CFKIT_PRESET_DIR', _default_preset_dir()),
        'log_level': os.environ.get('CFKIT_LOG_LEVEL', 'WARNING').upper(),
        'dmax': _env_int('CFKIT_DMAX', 200),
        'f1max': _env_int('CFKIT_F1MAX', 30),
        'truncation_depth': 64,
        'step_budget': 10000,
        'plot_resolution': 200,
    }


def list_presets(preset_dir: str = None) -> List[str]:
    """
    Names of the shipped presets, sorted.

    Args:
        preset_dir: Directory to scan, defaults to the configured one
    """
    if preset_dir is None:
        preset_dir = get_default_config()['preset_dir']
    if not os.path.isdir(preset_dir):
        return []
    return sorted(name[:-len('.json')] for name in os.listdir(preset_dir) if name.endswith('.json'))


def resolve_spec_path(name_or_path: str, preset_dir: str = None) -> str:
    """
    Resolve a preset name or a file path to a definition file.

    Args:
        name_or_path: Existing file path, or a preset name such as "farey"
        preset_dir: Directory holding presets

    Returns:
        Path of the definition file

    Raises:
        ParseError: if neither a file nor a preset of that name exists
    """
    if os.path.isfile(name_or_path):
        return name_or_path
    if preset_dir is None:
        preset_dir = get_default_config()['preset_dir']
    candidate = os.path.join(preset_dir, f"{name_or_path}.json")
    if os.path.isfile(candidate):
        return candidate
    known = ", ".join(list_presets(preset_dir)) or "none"
    raise ParseError(f"no file or preset named {name_or_path!r} (presets: {known})")


def load_preset(name: str, preset_dir: str = None) -> CFSpec:
    """Load a preset (or any definition file) by name or path."""
    return load_spec(resolve_spec_path(name, preset_dir))


def format_report(title: str, rows: Sequence[Tuple[str, object]]) -> str:
    """
    Format an aligned "Label : value" block under an underlined title.

    Args:
        title: Heading line
        rows: (label, value) pairs

    Returns:
        Formatted string
    """
    lines = [title, "=" * len(title)]
    width = max((len(label) for label, _ in rows), default=0)
    for label, value in rows:
        lines.append(f"{label.ljust(width)} : {value}")
    return '\n'.join(lines)


def save_results_to_file(results: Dict, output_path: str):
    """
    Save a report to a JSON file.

    Args:
        results: Results dictionary
        output_path: Output file path
    """
    with open(output_path, 'w', encoding='utf-8') as f:
        json.dump(results, f, ensure_ascii=False, indent=2)
