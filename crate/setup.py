"""Builds the qbr_py extension by delegating to cargo.

setuptools-rust is not assumed; a plain build_ext override compiles the
cdylib (release, with the extension-module feature so the artifact does
not link libpython) and copies it to wherever setuptools expects the
extension to appear.
"""

import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

ROOT = Path(__file__).resolve().parent
MANIFEST = ROOT / "crates" / "qbr-py" / "Cargo.toml"


class CargoExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CargoBuildExt(build_ext):
    def build_extension(self, ext):
        subprocess.run(
            [
                "cargo",
                "build",
                "--release",
                "--manifest-path",
                str(MANIFEST),
                "--features",
                "extension-module",
            ],
            check=True,
        )
        libname = {
            "win32": "qbr_py.dll",
            "darwin": "libqbr_py.dylib",
        }.get(sys.platform, "libqbr_py.so")
        built = ROOT / "target" / "release" / libname
        out = Path(self.get_ext_fullpath(ext.name))
        out.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(built, out)


setup(
    ext_modules=[CargoExtension("qbr_py")],
    cmdclass={"build_ext": CargoBuildExt},
)
