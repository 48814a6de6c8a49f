"""Build the fqc_py extension module by delegating to cargo.

The cdylib produced by `cargo build -p fqc-py` already is a CPython
extension module; this shim compiles it in release mode and copies it to
wherever setuptools expects the built extension.
"""

import json
import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

MANIFEST_DIR = Path(__file__).resolve().parent

LIB_NAMES = {
    "linux": "libfqc_py.so",
    "darwin": "libfqc_py.dylib",
    "win32": "fqc_py.dll",
}


def cargo_target_dir() -> Path:
    meta = subprocess.run(
        ["cargo", "metadata", "--format-version", "1", "--no-deps"],
        cwd=MANIFEST_DIR,
        check=True,
        capture_output=True,
        text=True,
    )
    return Path(json.loads(meta.stdout)["target_directory"])


class CargoBuildExt(build_ext):
    def build_extension(self, ext: Extension) -> None:
        subprocess.run(
            ["cargo", "build", "--release", "-p", "fqc-py"],
            cwd=MANIFEST_DIR,
            check=True,
        )
        for prefix, name in LIB_NAMES.items():
            if sys.platform.startswith(prefix):
                built = cargo_target_dir() / "release" / name
                break
        else:
            raise RuntimeError(f"unsupported platform {sys.platform!r}")
        out = Path(self.get_ext_fullpath(ext.name))
        out.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(built, out)


setup(
    ext_modules=[Extension("fqc_py", sources=[])],
    cmdclass={"build_ext": CargoBuildExt},
)
