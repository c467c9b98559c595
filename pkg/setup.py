#! /usr/bin/env python3
# -*- coding: utf-8 -*-


from setuptools import setup


with open("README.md", "r") as fh:
    long_description = fh.read()

setup(name="bregman_proximal_gradient",
      version="0.1",
      description="Bregman proximal gradient methods (plain, line search, accelerated, adaptive, dual averaging) for "
                  "relatively smooth convex optimization, with a benchmark harness.",
      long_description=long_description,
      long_description_content_type="text/markdown",
      author="bregman_proximal_gradient developers",
      license="MIT",
      packages=["bregman_proximal_gradient",
                "bregman_proximal_gradient.assisting_modules",
                "bregman_proximal_gradient.methods"],
      python_requires=">=3.7",
      install_requires=["numpy", "scipy"],
      extras_require={"test": ["pytest"]},
      entry_points={"console_scripts": ["bpg-harness=bregman_proximal_gradient.methods.harness:main"]},
      classifiers=["Programming Language :: Python :: 3",
                   "License :: OSI Approved :: MIT License",
                   "Operating System :: Unix",
                   "Intended Audience :: Science/Research",
                   "Environment :: Console",
                   "Topic :: Scientific/Engineering :: Mathematics"])
