from setuptools import find_packages, setup

with open("README.md") as fh:
    long_description = fh.read()

production_dependencies = [
    "numpy>=1.22.0",
    "pydantic>=2.0.0",
    "scipy>=1.8.0",
]

development_dependencies = [
    "pre-commit>=2.17.0",
]

with open("requirements.txt", "w", encoding="utf-8") as f:
    f.write("\n".join(production_dependencies + development_dependencies))

setup(
    name="phonon-diffusion",
    description=(
        "Linearized phonon Boltzmann operator of the FPU-beta chain and its fractional"
        " diffusion limit"
    ),
    long_description=long_description,
    long_description_content_type="text/markdown",
    version="0.1.0",
    author="phonon-diffusion developers",
    author_email="phonon-diffusion@users.noreply.github.com",
    license="AGPL-3.0",
    platforms="any",
    packages=find_packages(exclude=["tests", "utils"]),
    package_dir={"phonon_diffusion": "phonon_diffusion"},
    entry_points={
        "console_scripts": ["phonon-diffusion = phonon_diffusion.__main__:main"]
    },
    python_requires=">=3.9",
    install_requires=production_dependencies,
    extras_require={"dev": development_dependencies},
    zip_safe=False,
    keywords="phonon boltzmann kinetic fractional diffusion fpu",
    classifiers=[
        # More information at https://pypi.org/classifiers/.
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: GNU Affero General Public License v3",
        "Natural Language :: English",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Physics",
    ],
)
