import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="fmasr",
    version="0.1.0",
    description="Fast marching with anisotropic stencil refinement for asymmetric Finsler metrics in 2D",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(),
    install_requires=["numpy>=1.17", "scipy>=1.3.0", "sacred>=0.8.1", "colorlog>=4.0.2", "tqdm", "fasteners>=0.15"],
    extras_require={"dev": ["pre-commit", "pytest>=3.8.0", "pytest-mock>=1.10.4"]},
    classifiers=["Programming Language :: Python :: 3", "Operating System :: OS Independent"],
    python_requires=">=3.7",
    include_package_data=True,
    entry_points={"console_scripts": ["fmasr=fmasr.run:main"]},
)
