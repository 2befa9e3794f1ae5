#pragma once

#include "biostego/auth.hpp"
#include "biostego/config.hpp"
#include "biostego/enhancement.hpp"
#include "biostego/error.hpp"
#include "biostego/image.hpp"
#include "biostego/image_io.hpp"
#include "biostego/listega.hpp"
#include "biostego/matching.hpp"
#include "biostego/minutiae.hpp"
#include "biostego/pipeline.hpp"
#include "biostego/segmentation.hpp"
#include "biostego/skeleton.hpp"
#include "biostego/stego_lsb.hpp"
#include "biostego/template.hpp"
