#pragma once

// Umbrella header.
#include "librarylens/color.hpp"
#include "librarylens/error.hpp"
#include "librarylens/facets.hpp"
#include "librarylens/image.hpp"
#include "librarylens/ingest.hpp"
#include "librarylens/isbn.hpp"
#include "librarylens/library_store.hpp"
#include "librarylens/llm_http.hpp"
#include "librarylens/metadata.hpp"
#include "librarylens/pipeline.hpp"
#include "librarylens/providers.hpp"
#include "librarylens/serialization.hpp"
#include "librarylens/service.hpp"
#include "librarylens/shelf.hpp"
#include "librarylens/spinecolor.hpp"
#include "librarylens/visual.hpp"
#include "librarylens/volume.hpp"
