from setuptools import setup, find_packages

setup(
    name="hyperhate",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*"]),
    package_data={"hyperhate": ["config/defaults/*.json"]},
    install_requires=[
        'numpy>=1.21',
        'pandas>=1.5',
        'scikit-learn>=1.0',
    ],
    extras_require={
        'test': ['pytest>=7'],
    },
    entry_points={
        'console_scripts': ['hyperhate=hyperhate.cli:main'],
    },
    description="Compact character-level hate speech classifiers with generated convolution kernels",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    python_requires=">=3.8",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
    ],
)
