# Copyright 2020 Peter Bencze
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

from setuptools import setup, find_packages
from os import path

here = path.abspath(path.dirname(__file__))
with open(path.join(here, "README.md"), encoding="utf-8") as f:
    long_description = f.read()

setup(
    name="hsfomo",
    version="1.0.0",
    description="Free orthotropic material optimization in 2D plane stress with Voigt and Hashin-Shtrikman "
                "realizability bounds.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    license="Apache License, Version 2.0",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3.7",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    keywords="topology optimization free material optimization composites hashin-shtrikman laminates",
    packages=find_packages(exclude=["tests", "tests.*"]),
    python_requires=">=3.7",
    install_requires=[
        "appdirs>=1.4.4",
        "cerberus>=1.3.2",
        "click>=7.1.2",
        "numpy>=1.19",
        "scipy>=1.5",
        "toml>=0.10.2",
        "tqdm>=4.54.1",
    ],
    extras_require={
        "dev": [
            "black>=19.10b0",
            "coverage>=5.3",
            "hypothesis>=5.41",
            "pytest>=6.1.2",
            "pytest-cov>=2.10.1",
            "pytest-mock>=3.3.1",
        ]
    },
    entry_points={
        "console_scripts": [
            "hsfomo=hsfomo.cli:main",
        ],
    },
)
